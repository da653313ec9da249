#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "growthlab/geometry.hpp"
#include "growthlab/harness.hpp"
#include "growthlab/oscint.hpp"

namespace {

using growthlab::harness::ConfigError;
using growthlab::harness::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string tolerance_profile;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out", opts.out, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "seed override (config must carry one otherwise)");
    cmd->add_option("--workers", opts.workers, "worker thread count");
    cmd->add_option("--tolerance-profile", opts.tolerance_profile,
                    "tolerance profile name (default|quick)");
}

int run_kind(const std::string& kind, const CommonOpts& opts) {
    auto cfg = ExperimentConfig::load(opts.config_path);
    if (!cfg.doc().contains("kind"))
        cfg.doc()["kind"] = kind;
    else if (cfg.kind() != kind)
        throw ConfigError("config kind '" + cfg.kind() + "' does not match subcommand '" +
                          kind + "'");
    if (!opts.out.empty()) cfg.doc()["out"] = opts.out;
    if (opts.seed) cfg.doc()["seed"] = *opts.seed;
    if (opts.workers) cfg.doc()["workers"] = *opts.workers;
    if (!opts.tolerance_profile.empty())
        cfg.doc()["tolerance_profile"] = opts.tolerance_profile;
    cfg.validate();
    const auto rec = growthlab::harness::run(cfg);
    std::string pass = "n/a";
    if (rec.pass) pass = *rec.pass ? "PASS" : "FAIL";
    std::printf("%s: hash=%016llx wall=%.0fms prediction-check=%s\n", rec.kind.c_str(),
                (unsigned long long)rec.config_hash, rec.wall_ms, pass.c_str());
    std::printf("  out: %s (%zu files)\n", cfg.out_dir().c_str(), rec.files.size());
    return (rec.pass && !*rec.pass) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for boundary-flatness indices, Fourier decay, "
                 "lattice discrepancy, and perturbation stability"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds{"index",   "fourier",   "surface",
                                         "lattice", "stability", "vdc"};
    std::vector<CommonOpts> opts(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        auto* cmd = app.add_subcommand(kinds[i], "run a " + kinds[i] + " experiment");
        add_common(cmd, opts[i]);
    }

    auto* rep = app.add_subcommand("report", "aggregate manifests into a summary table");
    std::vector<std::string> manifest_paths;
    rep->add_option("manifests", manifest_paths, "manifest.json paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (std::size_t i = 0; i < kinds.size(); ++i)
            if (app.got_subcommand(kinds[i])) return run_kind(kinds[i], opts[i]);
        if (app.got_subcommand("report")) {
            std::vector<std::filesystem::path> paths(manifest_paths.begin(),
                                                     manifest_paths.end());
            const auto outcome = growthlab::harness::report(paths);
            std::fputs(outcome.table.c_str(), stdout);
            return (outcome.failures > 0 || outcome.missing > 0) ? 1 : 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const growthlab::geometry::BudgetError& e) {
        std::fprintf(stderr, "numeric budget failure: %s\n", e.what());
        return 3;
    } catch (const growthlab::oscint::BudgetError& e) {
        std::fprintf(stderr, "numeric budget failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
