#pragma once

#include "combipen/estimators.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace combipen {

enum class DesignKind { iid, correlated };

struct DesignSpec {
    DesignKind kind = DesignKind::iid;
    // Off-diagonal covariance for correlated designs, in [0, 1).
    double rho = 0.0;
};

struct Instance {
    Matrix x;
    Vector y;
    Vector w_star;
    SupportSet support;
};

struct InstanceOptions {
    double amplitude = 0.9;
    bool normalize_columns = true;
};

// Constant signal on a random interval of length k; Gaussian design with
// covariance (1 - rho) I + rho 1 1^T; y = X w* + sigma * noise.
Instance generate_instance(int d, int k, int n, const DesignSpec& design, double sigma, std::uint64_t seed,
                           const InstanceOptions& options = {});

enum class AdaptiveMode { off, on, both };

struct ExperimentConfig {
    int d = 50;
    int k = 20;
    int n = 150;
    DesignSpec design{DesignKind::correlated, 0.5};
    std::vector<double> sigmas{1e-4, 1e-3, 1e-2};
    int seeds = 5;
    std::uint64_t master_seed = 1;
    std::vector<std::string> regularizers{"l1", "theta_inf_range", "group_l1_linf_modified_range"};
    AdaptiveMode adaptive = AdaptiveMode::both;
    double alpha = 0.3;
    double amplitude = 0.9;
    PathOptions path;
    // Worker threads for the sweep; 0 uses the hardware concurrency. Output
    // does not depend on it.
    int threads = 0;

    void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentRow {
    double sigma = 0.0;
    std::string regularizer;
    bool adaptive = false;
    // Seed index; -1 marks a mean-over-seeds row.
    int seed = 0;
    double best_hamming = 0.0;
    double best_est_error = 0.0;
    double best_lambda_hamming = 0.0;
    double best_lambda_err = 0.0;

    friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    int failures = 0;
    std::vector<std::string> errors;
};

// Seed of the instance for (sigma index, seed index).
std::uint64_t instance_seed(std::uint64_t master, int sigma_index, int seed_index);

using ProgressCallback = std::function<void(const std::string&)>;

// Full factorial sweep; per-seed rows followed by per-cell means.
ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressCallback& progress = {});

void emit_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> parse_csv(std::istream& in);
void emit_metadata(std::ostream& out, const ExperimentConfig& config);

} // namespace combipen
