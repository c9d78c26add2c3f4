#pragma once

#include "twistflow/core.hpp"
#include "twistflow/suspension.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Experiment orchestration: named pipelines over the other modules with a
// JSON config, deterministic JSON reports and CSV/binary data files.

namespace twistflow::experiments {

struct ExperimentConfig {
    double epsilon = 0.3;
    double band_K = 12.0;
    std::optional<double> A;  // auto-derived from D when absent
    std::optional<double> B;
    GridSpec grid;
    int n_iter = 1000;
    int n_samples = 100;
    double threshold = 0.05;
    double integrator_tol = 1e-9;
    double el_tol = 1e-10;
    suspension::IntegratorProfile integrator = suspension::IntegratorProfile::accurate();
    std::string map = "twist";  // twist | shear | return
    std::uint64_t seed = 20240817;
    std::string out_dir = "out";

    // Baseline defaults specialized per experiment (epsilon, grid, profile).
    static ExperimentConfig defaults_for(const std::string& experiment);
    static ExperimentConfig from_json_file(const std::string& experiment, const std::string& path);
    void apply_override(const std::string& key, const std::string& value);
    std::string to_json() const;
};

struct Assertion {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<Assertion> assertions;
    std::string report_json;
    bool pass = true;
    double seconds = 0.0;
};

const std::vector<std::string>& experiment_names();

// Runs one experiment, writes report.json (and data files) into
// config.out_dir. Returns the result; throws on invalid configuration.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& config);

}  // namespace twistflow::experiments
