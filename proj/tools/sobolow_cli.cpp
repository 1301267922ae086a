#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "sobolow/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lower and upper bounds for variance-based sensitivity indices"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_override;
    std::string format_override;
    long long seed_override = -1;
    bool quadrature_flag = false;
    bool no_cache = false;
    app.add_option("--config", config_path, "configuration file (JSON)")->required();
    app.add_option("--seed", seed_override, "override the configured seed");
    app.add_option("--out", out_override, "output directory");
    app.add_option("--format", format_override, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--quadrature", quadrature_flag, "use a deterministic tensor quadrature design");
    app.add_flag("--no-cache", no_cache, "recompute spectra instead of using the disk cache");

    app.add_subcommand("spectrum", "solve and store the input spectra");
    app.add_subcommand("bounds", "estimate sensitivity bounds");
    app.add_subcommand("oracle", "exact decomposition reference for low dimension");
    app.add_subcommand("benchmark", "bounds alongside a pick-freeze reference");

    CLI11_PARSE(app, argc, argv);

    try {
        sobolow::RunConfig cfg = sobolow::load_config(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (!out_override.empty()) cfg.out = out_override;
        if (!format_override.empty()) cfg.format = format_override;
        if (quadrature_flag) cfg.quadrature = true;
        if (no_cache) cfg.cache = false;
        return sobolow::run_command(app.get_subcommands().front()->get_name(), std::move(cfg));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
