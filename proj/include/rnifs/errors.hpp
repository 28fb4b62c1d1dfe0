#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnifs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownMapError : Error {
    explicit UnknownMapError(const std::string& id)
        : Error("unknown map id: " + id), id(id) {}
    std::string id;
};

struct NonFiniteResultError : Error {
    using Error::Error;
};

struct DivergedError : Error {
    DivergedError(std::size_t step, const std::string& what)
        : Error("orbit diverged at step " + std::to_string(step) + ": " + what),
          step(step) {}
    std::size_t step;
};

struct InvalidProbabilitiesError : Error {
    using Error::Error;
};

struct LengthMismatchError : Error {
    using Error::Error;
};

struct InvalidAlphasError : Error {
    using Error::Error;
};

struct InvalidCapError : Error {
    using Error::Error;
};

struct SupportTooLargeError : Error {
    using Error::Error;
};

struct LogOfZeroError : Error {
    explicit LogOfZeroError(std::size_t step)
        : Error("singular Jacobian (zero norm) at orbit step " + std::to_string(step)),
          step(step) {}
    std::size_t step;
};

struct EmptyCloudError : Error {
    using Error::Error;
};

struct InsufficientScalesError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace rnifs
