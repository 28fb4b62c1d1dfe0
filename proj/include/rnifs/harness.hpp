#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnifs/dimension.hpp"
#include "rnifs/geometry.hpp"
#include "rnifs/stability.hpp"

namespace rnifs {

struct OutputFlags {
    bool points = true;
    bool density = true;
    bool scatter = true;
    bool boxdim = true;
    bool infodim = false;
    bool corrdim = false;
    bool stability = true;
};

bool operator==(const OutputFlags& a, const OutputFlags& b);

// One experiment: which maps, how they are weighted, how long to run.
// Exactly one of probs / dirichlet_alphas is set.
struct ExperimentConfig {
    std::string name;
    std::vector<std::string> map_ids;
    std::vector<double> probs;
    std::vector<double> dirichlet_alphas;
    std::size_t iterations = 100000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    Point2 x0{0.1, 0.1};
    OutputFlags outputs;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct ExperimentResult {
    std::string config_digest;
    std::vector<DimensionEstimate> dimension_estimates;
    std::optional<StabilityReport> stability;
    std::vector<std::filesystem::path> artifact_paths;
    double wall_time = 0.0;
};

struct CaseStudyReport {
    DimensionEstimate classical;
    DimensionEstimate extended;
    double delta = 0.0;  // extended - classical
};

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

// Resolves dirichlet_alphas (when present) deterministically from cfg.seed
// and builds the system from the registry.
RnifsSystem system_from_config(const ExperimentConfig& cfg);

// The stability report run_experiment writes for this config.
StabilityReport config_stability_report(const ExperimentConfig& cfg);

// Runs the orbit and writes the requested artifacts into out_dir/<name>/.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir);

struct SuiteRow {
    std::string name;
    bool failed = false;
    std::string failure;  // error text when failed
    double box_dim = 0.0;
    double r_squared = 0.0;
    double lyapunov = 0.0;
    std::string verdict;
    double wall_time = 0.0;
};

// Runs every *.json in config_dir (sorted by filename), continues past
// failures, writes <out_dir>/summary.csv, returns the rows.
std::vector<SuiteRow> run_suite(const std::filesystem::path& config_dir,
                                const std::filesystem::path& out_dir);

inline constexpr std::uint64_t kCaseStudySeed = 20240917;

// Classical three-map triangle system vs. the four-map nonlinear extension,
// 100000 iterations each with a 100-step burn-in; writes per-arm images and
// a side-by-side JSON report into out_dir.
CaseStudyReport case_study(const std::filesystem::path& out_dir,
                           std::uint64_t seed = kCaseStudySeed);

// Image sizes used by run_experiment and case_study.
inline constexpr std::size_t kDensityImageSide = 512;
inline constexpr std::size_t kScatterImageSide = 800;

}  // namespace rnifs
