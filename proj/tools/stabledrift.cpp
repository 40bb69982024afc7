#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stabledrift/anchors.hpp"
#include "stabledrift/config.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/scenarios.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitAdmissibility = 3;

int list_scenarios() {
    for (const auto& s : sd::cli::anchors::scenarios())
        std::cout << s.name << "\t" << s.anchor << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable-drift numerical laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_n;
    bool quick = false, verbose = false;

    auto* run = app.add_subcommand("run", "run the scenario named in a config file");
    run->add_option("config", config_path, "key=value or JSON config")->required();
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--out-dir", out_dir, "directory that receives reports/<timestamp>/");
    run->add_option("--grid-n", grid_n, "override grid points per axis");
    run->add_flag("--quick", quick, "halve grids and path counts");
    run->add_flag("-v,--verbose", verbose, "log each check");
    auto* ls = app.add_subcommand("list-scenarios", "list scenarios with their citations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }
    if (ls->parsed()) return list_scenarios();

    sd::cli::ExperimentConfig cfg;
    try {
        cfg = sd::cli::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (quick) cfg.quick = true;
        if (grid_n) {
            if (*grid_n < 4 || *grid_n % 2 != 0 || *grid_n > 256)
                throw sd::ConfigError("--grid-n must be even and in [4, 256]");
            cfg.N = *grid_n;
        }
    } catch (const sd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const sd::AdmissibilityError& e) {
        std::cerr << "inadmissible config: " << e.what() << "\n";
        return kExitAdmissibility;
    }

    try {
        sd::cli::Logger log;
        if (verbose) log = [](const std::string& s) { std::cerr << s << "\n"; };
        auto out = sd::cli::run_experiment(cfg, out_dir, log);
        std::cout << out.bundle_dir.string() << "\n";
        for (const auto& r : out.summary["reports"])
            std::cout << r["verdict"].get<std::string>() << "\t" << r["name"].get<std::string>() << "\n";
        std::cout << "verdict: " << out.summary["verdict"].get<std::string>() << "\n";
        return out.exit_code;
    } catch (const sd::AdmissibilityError& e) {
        std::cerr << "inadmissible config: " << e.what() << "\n";
        return kExitAdmissibility;
    } catch (const sd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitFail;
    }
}
