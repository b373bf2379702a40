#pragma once
// Configuration-driven experiment runner. Every verifier and sweep is
// reachable by name; each run writes a manifest, a CSV with a #-prefixed
// schema line (byte-identical across reruns for a fixed config and seed),
// and a gnuplot script over column references.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> kv;

    static const std::vector<std::string>& known_experiments();

    // typed access with validation errors naming the field
    bool has(const std::string& key) const { return kv.count(key) > 0; }
    double get_real(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;
    std::uint64_t seed() const; // default 1, recorded in the manifest
};

// flat `key = value` lines, '#' comments
ExperimentConfig load_config(const std::filesystem::path& file);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Row producers, one per experiment. These also enforce the experiment's
// pass conditions (throwing ChainStepError / TailBudgetError / Validation-
// Error), so the CLI exit codes mirror the library exceptions.
Table run_plancherel(const ExperimentConfig& cfg);
Table run_polar_identity(const ExperimentConfig& cfg);
Table run_sphere_scaling(const ExperimentConfig& cfg);
Table run_cone_chain(const ExperimentConfig& cfg);
Table run_slope_sweep(const ExperimentConfig& cfg);
Table run_m_chain(const ExperimentConfig& cfg);
Table run_mf_chain(const ExperimentConfig& cfg);
Table run_product_chain(const ExperimentConfig& cfg);
Table run_embedding_check(const ExperimentConfig& cfg);
Table run_strichartz(const ExperimentConfig& cfg);
Table run_anisotropic(const ExperimentConfig& cfg);
Table run_counterexample_hyperplane(const ExperimentConfig& cfg);
Table run_counterexample_flatness(const ExperimentConfig& cfg);
Table run_knapp_sweep(const ExperimentConfig& cfg);

// Dispatch by cfg.experiment, write <out>/<experiment>/{manifest.txt,
// data.csv, plot.gp}. Returns the process exit code: 0 success,
// 2 validation, 3 chain-step failure, 4 tail budget.
int run(const ExperimentConfig& cfg, std::string* error_message = nullptr);

// least-squares slope of log(y) against log(x); the sweeps' flatness checks
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace rlab
