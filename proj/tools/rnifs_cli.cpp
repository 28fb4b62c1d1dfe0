#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rnifs/dimension.hpp"
#include "rnifs/errors.hpp"
#include "rnifs/harness.hpp"
#include "rnifs/maps.hpp"
#include "rnifs/rng.hpp"
#include "rnifs/stability.hpp"
#include "rnifs/system.hpp"

namespace {

void print_estimate(const rnifs::DimensionEstimate& est) {
    std::printf("  %-12s %7.4f  (r^2 %.4f, window [%.3g, %.3g])\n",
                rnifs::estimator_name(est.estimator), est.value, est.r_squared,
                est.window_min_eps, est.window_max_eps);
}

int dispatch(const CLI::App& app, const std::string& config_path,
             const std::string& config_dir, const std::string& out_dir,
             const std::string& points_path, std::optional<std::uint64_t> seed,
             bool quiet) {
    if (app.got_subcommand("list-maps")) {
        for (const rnifs::MapDescriptor& m : rnifs::registered_maps())
            std::printf("%-8s %-7s %s\n", m.id.c_str(),
                        m.is_affine ? "affine" : "",
                        m.description.c_str());
        return 0;
    }

    if (app.got_subcommand("run")) {
        rnifs::ExperimentConfig cfg = rnifs::load_config(config_path);
        if (seed) cfg.seed = *seed;
        const rnifs::ExperimentResult res = rnifs::run_experiment(cfg, out_dir);
        if (!quiet) {
            std::printf("%s: %zu artifacts in %s/%s (digest %s, %.3f s)\n",
                        cfg.name.c_str(), res.artifact_paths.size(),
                        out_dir.c_str(), cfg.name.c_str(),
                        res.config_digest.c_str(), res.wall_time);
            for (const rnifs::DimensionEstimate& est : res.dimension_estimates)
                print_estimate(est);
            if (res.stability)
                std::printf("  stability    %s (lyapunov %.4f +- %.4f)\n",
                            rnifs::verdict_name(res.stability->verdict),
                            res.stability->lyapunov_estimate,
                            res.stability->std_error);
        }
        return 0;
    }

    if (app.got_subcommand("suite")) {
        auto rows = [&] {
            if (!seed) return rnifs::run_suite(config_dir, out_dir);
            // Seed override: rewrite configs into a scratch dir first.
            namespace fs = std::filesystem;
            const fs::path scratch = fs::path(out_dir) / "_seed_override";
            fs::create_directories(scratch);
            for (const auto& entry : fs::directory_iterator(config_dir)) {
                if (!entry.is_regular_file() ||
                    entry.path().extension() != ".json")
                    continue;
                rnifs::ExperimentConfig cfg = rnifs::load_config(entry.path());
                cfg.seed = *seed;
                rnifs::save_config(cfg, scratch / entry.path().filename());
            }
            return rnifs::run_suite(scratch, out_dir);
        }();
        int failures = 0;
        for (const rnifs::SuiteRow& row : rows) {
            if (row.failed) {
                ++failures;
                if (!quiet)
                    std::printf("%-24s FAILED  %s\n", row.name.c_str(),
                                row.failure.c_str());
            } else if (!quiet) {
                std::printf("%-24s box %.4f  r^2 %.4f  lyapunov %+.4f  %s  %.3f s\n",
                            row.name.c_str(), row.box_dim, row.r_squared,
                            row.lyapunov, row.verdict.c_str(), row.wall_time);
            }
        }
        if (!quiet)
            std::printf("%zu experiments, %d failed; summary at %s/summary.csv\n",
                        rows.size(), failures, out_dir.c_str());
        return 0;
    }

    if (app.got_subcommand("case-study")) {
        const rnifs::CaseStudyReport rep =
            seed ? rnifs::case_study(out_dir, *seed) : rnifs::case_study(out_dir);
        if (!quiet) {
            std::printf("classical box dimension: %.4f (r^2 %.4f)\n",
                        rep.classical.value, rep.classical.r_squared);
            std::printf("extended  box dimension: %.4f (r^2 %.4f)\n",
                        rep.extended.value, rep.extended.r_squared);
            std::printf("delta: %+.4f\n", rep.delta);
        }
        return 0;
    }

    if (app.got_subcommand("dims")) {
        const rnifs::PointCloud cloud = rnifs::read_points_csv(points_path);
        const rnifs::BoxCountSeries series =
            rnifs::box_counts(cloud, rnifs::kDefaultBoxLevels);
        const rnifs::DimensionEstimate box = rnifs::fit_dimension(series);
        const rnifs::DimensionEstimate info =
            rnifs::information_dimension(cloud, rnifs::kDefaultBoxLevels);
        const rnifs::DimensionEstimate corr = rnifs::correlation_dimension(
            cloud, rnifs::default_radii(cloud), rnifs::kDefaultMaxPairs,
            seed ? *seed : 1);
        std::printf("{\n  \"box\": %s,\n  \"information\": %s,\n"
                    "  \"correlation\": %s\n}\n",
                    rnifs::to_json(box).c_str(), rnifs::to_json(info).c_str(),
                    rnifs::to_json(corr).c_str());
        return 0;
    }

    if (app.got_subcommand("stability")) {
        rnifs::ExperimentConfig cfg = rnifs::load_config(config_path);
        if (seed) cfg.seed = *seed;
        const rnifs::StabilityReport rep = rnifs::config_stability_report(cfg);
        std::fputs(rnifs::to_json(rep).c_str(), stdout);
        return 0;
    }

    std::fputs("no subcommand given\n", stderr);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random nonlinear iterated function system experiment runner"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--seed", seed, "override configured seeds");
    app.add_flag("--quiet", quiet, "suppress informational output");

    std::string config_path, config_dir, out_dir = "out", points_path;

    app.add_subcommand("list-maps", "print the registered map library");

    CLI::App* run = app.add_subcommand("run", "run one experiment config");
    run->add_option("config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");

    CLI::App* suite = app.add_subcommand("suite", "run every config in a directory");
    suite->add_option("config-dir", config_dir, "directory of config JSONs")
        ->required();
    suite->add_option("--out", out_dir, "output directory (default: out)");

    CLI::App* cs = app.add_subcommand(
        "case-study", "classical triangle system vs. nonlinear extension");
    cs->add_option("--out", out_dir, "output directory (default: out)");

    CLI::App* dims = app.add_subcommand(
        "dims", "dimension estimators over an external points CSV");
    dims->add_option("points", points_path, "CSV with x,y header")->required();

    CLI::App* stab = app.add_subcommand(
        "stability", "stability report for a config, JSON on stdout");
    stab->add_option("config", config_path, "experiment config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        return dispatch(app, config_path, config_dir, out_dir, points_path, seed,
                        quiet);
    } catch (const rnifs::DivergedError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const rnifs::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
