#include "twistflow/acceptance.hpp"
#include "twistflow/experiments.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"twistflow: perturbed twist maps embedded in a Finsler geodesic flow on T^2"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a named experiment");
    std::string experiment;
    run->add_option("experiment", experiment, "one of: flat-check conjugacy ftle-field island-area kam-scan portrait cr-distance")
        ->required();
    std::string config_path;
    run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    std::vector<std::string> overrides;
    run->add_option("--set", overrides, "override config fields, e.g. --set epsilon=0.5 --set grid.nx=128");
    std::string out_dir;
    run->add_option("--out", out_dir, "output directory (default from config)");

    auto* verify = app.add_subcommand("verify", "run the full acceptance suite");
    std::vector<int> only;
    verify->add_option("--only", only, "criterion ids to run (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            twistflow::experiments::ExperimentConfig cfg =
                config_path.empty()
                    ? twistflow::experiments::ExperimentConfig::defaults_for(experiment)
                    : twistflow::experiments::ExperimentConfig::from_json_file(experiment,
                                                                               config_path);
            for (const auto& kv : overrides) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
                cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!out_dir.empty()) cfg.out_dir = out_dir;

            auto result = twistflow::experiments::run_experiment(experiment, cfg);
            std::cout << result.report_json << "\n";
            std::cerr << experiment << ": " << (result.pass ? "PASS" : "FAIL") << " ("
                      << result.seconds << " s), report in " << cfg.out_dir << "/report.json\n";
            return result.pass ? 0 : 1;
        }
        if (*verify) {
            auto results = twistflow::acceptance::run_all(std::cout, only);
            bool all = true;
            for (const auto& r : results) all &= r.pass;
            std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
            return all ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
