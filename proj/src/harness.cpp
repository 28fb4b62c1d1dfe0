#include "rnifs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "rnifs/errors.hpp"
#include "rnifs/maps.hpp"
#include "rnifs/render.hpp"
#include "rnifs/rng.hpp"
#include "rnifs/system.hpp"

namespace rnifs {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace {

// Sub-stream tags so the dirichlet draw, the correlation subsample, and the
// stability orbit never share a stream with the main orbit.
constexpr std::uint64_t kDirichletStreamTag = 0xD1;
constexpr std::uint64_t kCorrelationStreamTag = 0xC0;
constexpr std::uint64_t kStabilityStreamTag = 0x57;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool safe_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

void validate_config(const ExperimentConfig& cfg) {
    if (!safe_name(cfg.name))
        throw ValidationError(
            "name must be non-empty and use only [A-Za-z0-9_-] (it becomes a "
            "directory name)");
    if (cfg.map_ids.empty()) throw ValidationError("map_ids must be non-empty");
    for (const std::string& id : cfg.map_ids) {
        try {
            lookup(id);
        } catch (const UnknownMapError& e) {
            throw ValidationError(std::string("unregistered map id: ") + e.id);
        }
    }
    const bool has_p = !cfg.probs.empty();
    const bool has_a = !cfg.dirichlet_alphas.empty();
    if (has_p == has_a)
        throw ValidationError(
            "exactly one of probs / dirichlet_alphas must be present");
    if (has_p) {
        if (cfg.probs.size() != cfg.map_ids.size())
            throw ValidationError("probs length must match map_ids");
        try {
            ProbabilityVector::checked(cfg.probs);
        } catch (const InvalidProbabilitiesError& e) {
            throw ValidationError(std::string("invalid probs: ") + e.what());
        }
    } else {
        if (cfg.dirichlet_alphas.size() != cfg.map_ids.size())
            throw ValidationError("dirichlet_alphas length must match map_ids");
        for (double a : cfg.dirichlet_alphas)
            if (!(a > 0.0))
                throw ValidationError("dirichlet_alphas must be positive");
    }
    if (cfg.iterations <= cfg.burn_in)
        throw ValidationError("iterations must exceed burn_in");
}

std::string json_file_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string dimension_json(const std::vector<DimensionEstimate>& ests) {
    std::string out = "{\n";
    for (std::size_t i = 0; i < ests.size(); ++i) {
        out += std::string("  \"") + estimator_name(ests[i].estimator) +
               "\": " + to_json(ests[i]);
        out += i + 1 < ests.size() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

}  // namespace

bool operator==(const OutputFlags& a, const OutputFlags& b) {
    return a.points == b.points && a.density == b.density &&
           a.scatter == b.scatter && a.boxdim == b.boxdim &&
           a.infodim == b.infodim && a.corrdim == b.corrdim &&
           a.stability == b.stability;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.map_ids == b.map_ids && a.probs == b.probs &&
           a.dirichlet_alphas == b.dirichlet_alphas &&
           a.iterations == b.iterations && a.burn_in == b.burn_in &&
           a.seed == b.seed && a.x0 == b.x0 && a.outputs == b.outputs;
}

ExperimentConfig load_config(const fs::path& path) {
    njson j;
    try {
        j = njson::parse(json_file_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.name = j.at("name").get<std::string>();
        cfg.map_ids = j.at("map_ids").get<std::vector<std::string>>();
        if (j.contains("probs"))
            cfg.probs = j["probs"].get<std::vector<double>>();
        if (j.contains("dirichlet_alphas"))
            cfg.dirichlet_alphas =
                j["dirichlet_alphas"].get<std::vector<double>>();
        if (j.contains("iterations"))
            cfg.iterations = j["iterations"].get<std::size_t>();
        if (j.contains("burn_in")) cfg.burn_in = j["burn_in"].get<std::size_t>();
        if (!j.contains("seed"))
            throw ValidationError("seed is required in " + path.string());
        cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("x0")) {
            const auto v = j["x0"].get<std::vector<double>>();
            if (v.size() != 2) throw ValidationError("x0 must be [x, y]");
            cfg.x0 = {v[0], v[1]};
        }
        if (j.contains("outputs")) {
            const njson& o = j["outputs"];
            auto flag = [&o](const char* key, bool dflt) {
                return o.contains(key) ? o[key].get<bool>() : dflt;
            };
            cfg.outputs.points = flag("points", cfg.outputs.points);
            cfg.outputs.density = flag("density", cfg.outputs.density);
            cfg.outputs.scatter = flag("scatter", cfg.outputs.scatter);
            cfg.outputs.boxdim = flag("boxdim", cfg.outputs.boxdim);
            cfg.outputs.infodim = flag("infodim", cfg.outputs.infodim);
            cfg.outputs.corrdim = flag("corrdim", cfg.outputs.corrdim);
            cfg.outputs.stability = flag("stability", cfg.outputs.stability);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    validate_config(cfg);
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const fs::path& path) {
    njson j;
    j["name"] = cfg.name;
    j["map_ids"] = cfg.map_ids;
    if (!cfg.probs.empty()) j["probs"] = cfg.probs;
    if (!cfg.dirichlet_alphas.empty())
        j["dirichlet_alphas"] = cfg.dirichlet_alphas;
    j["iterations"] = cfg.iterations;
    j["burn_in"] = cfg.burn_in;
    j["seed"] = cfg.seed;
    j["x0"] = {cfg.x0.x, cfg.x0.y};
    j["outputs"] = {{"points", cfg.outputs.points},
                    {"density", cfg.outputs.density},
                    {"scatter", cfg.outputs.scatter},
                    {"boxdim", cfg.outputs.boxdim},
                    {"infodim", cfg.outputs.infodim},
                    {"corrdim", cfg.outputs.corrdim},
                    {"stability", cfg.outputs.stability}};
    write_text(path, j.dump(2) + "\n");
}

RnifsSystem system_from_config(const ExperimentConfig& cfg) {
    validate_config(cfg);
    std::vector<double> probs = cfg.probs;
    if (probs.empty()) {
        Xoshiro256ss drng(derive_stream_seed(cfg.seed, kDirichletStreamTag));
        probs = dirichlet_probabilities(cfg.dirichlet_alphas, drng).p;
    }
    return make_system(cfg.map_ids, probs);
}

StabilityReport config_stability_report(const ExperimentConfig& cfg) {
    const RnifsSystem sys = system_from_config(cfg);
    const std::size_t n = std::max<std::size_t>(cfg.iterations, 100);
    return stability_report(sys, kReferenceWindow, n,
                            derive_stream_seed(cfg.seed, kStabilityStreamTag));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const RnifsSystem sys = system_from_config(cfg);

    PointCloud cloud;
    try {
        cloud = generate_orbit(sys, cfg.x0, cfg.iterations, cfg.burn_in, cfg.seed);
    } catch (const DivergedError& e) {
        throw DivergedError(e.step, "config '" + cfg.name + "'");
    }

    const fs::path dir = out_dir / cfg.name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    ExperimentResult res;
    res.config_digest = cloud.config_digest;
    auto emit = [&res](const fs::path& p) { res.artifact_paths.push_back(p); };

    if (cfg.outputs.points) {
        write_points_csv(cloud, dir / "points.csv");
        emit(dir / "points.csv");
    }
    if (cfg.outputs.density) {
        write_density_image(density_grid(cloud, kDensityImageSide, kDensityImageSide),
                            dir / "density.ppm");
        emit(dir / "density.ppm");
    }
    if (cfg.outputs.scatter) {
        write_scatter_image(cloud, kScatterImageSide, kScatterImageSide,
                            dir / "scatter.ppm");
        emit(dir / "scatter.ppm");
    }
    if (cfg.outputs.boxdim) {
        const BoxCountSeries series = box_counts(cloud, kDefaultBoxLevels);
        const DimensionEstimate est = fit_dimension(series);
        write_box_series_csv(series, dir / "boxcount.csv");
        emit(dir / "boxcount.csv");
        res.dimension_estimates.push_back(est);
    }
    if (cfg.outputs.infodim)
        res.dimension_estimates.push_back(
            information_dimension(cloud, kDefaultBoxLevels));
    if (cfg.outputs.corrdim)
        res.dimension_estimates.push_back(correlation_dimension(
            cloud, default_radii(cloud), kDefaultMaxPairs,
            derive_stream_seed(cfg.seed, kCorrelationStreamTag)));
    if (!res.dimension_estimates.empty()) {
        write_text(dir / "dimension.json", dimension_json(res.dimension_estimates));
        emit(dir / "dimension.json");
    }
    if (cfg.outputs.stability) {
        try {
            res.stability = config_stability_report(cfg);
        } catch (const DivergedError& e) {
            throw DivergedError(e.step, "config '" + cfg.name + "' (stability orbit)");
        }
        write_text(dir / "stability.json", to_json(*res.stability));
        emit(dir / "stability.json");
    }

    res.wall_time = seconds_since(t0);
    return res;
}

std::vector<SuiteRow> run_suite(const fs::path& config_dir,
                                const fs::path& out_dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<SuiteRow> rows;
    for (const fs::path& file : files) {
        SuiteRow row;
        row.name = file.stem().string();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const ExperimentConfig cfg = load_config(file);
            row.name = cfg.name;
            const ExperimentResult res = run_experiment(cfg, out_dir);
            row.wall_time = res.wall_time;
            for (const DimensionEstimate& est : res.dimension_estimates) {
                if (est.estimator == DimensionEstimator::Box) {
                    row.box_dim = est.value;
                    row.r_squared = est.r_squared;
                }
            }
            if (res.stability) {
                row.lyapunov = res.stability->lyapunov_estimate;
                row.verdict = verdict_name(res.stability->verdict);
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.failure = e.what();
            row.wall_time = seconds_since(t0);
        }
        rows.push_back(row);
    }

    std::string csv = "name,box_dim,r_squared,lyapunov,verdict,wall_time\n";
    char line[160];
    for (const SuiteRow& row : rows) {
        if (row.failed) {
            std::string msg = row.failure;
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            csv += row.name + ",,,,failed: " + msg + ",";
            std::snprintf(line, sizeof line, "%.3f\n", row.wall_time);
            csv += line;
        } else {
            std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,", row.box_dim,
                          row.r_squared, row.lyapunov);
            csv += row.name + "," + line + row.verdict + ",";
            std::snprintf(line, sizeof line, "%.3f\n", row.wall_time);
            csv += line;
        }
    }
    write_text(out_dir / "summary.csv", csv);
    return rows;
}

CaseStudyReport case_study(const fs::path& out_dir, std::uint64_t seed) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const auto arm = [&](const std::vector<std::string>& ids,
                         const std::vector<double>& probs,
                         const std::string& label) {
        const RnifsSystem sys = make_system(ids, probs);
        const PointCloud cloud = generate_orbit(sys, kDefaultX0, 100000, 100, seed);
        write_density_image(
            density_grid(cloud, kDensityImageSide, kDensityImageSide),
            out_dir / (label + "_density.ppm"));
        write_scatter_image(cloud, kScatterImageSide, kScatterImageSide,
                            out_dir / (label + "_scatter.ppm"));
        const BoxCountSeries series = box_counts(cloud, kDefaultBoxLevels);
        const DimensionEstimate est = fit_dimension(series);
        write_loglog_csv(series, est, out_dir / (label + "_loglog.csv"));
        return est;
    };

    CaseStudyReport rep;
    const double third = 1.0 / 3.0;
    rep.classical = arm({"sier1", "sier2", "sier3"}, {third, third, third},
                        "classical");
    rep.extended = arm({"sier1", "sier2", "sier3", "sier_nl"},
                       {0.25, 0.25, 0.25, 0.25}, "extended");
    rep.delta = rep.extended.value - rep.classical.value;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "{\n  \"classical_dim\": %.6f,\n  \"extended_dim\": %.6f,\n"
                  "  \"delta\": %.6f\n}\n",
                  rep.classical.value, rep.extended.value, rep.delta);
    write_text(out_dir / "case_study.json", buf);
    return rep;
}

}  // namespace rnifs
