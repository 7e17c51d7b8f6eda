#pragma once

#include "combipen/penalty.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace combipen {

// Least-squares data y = X w + noise with n >= d and X^T X / n positive
// definite.
class RegressionProblem {
public:
    RegressionProblem(Matrix x, Vector y);

    const Matrix& x() const { return x_; }
    const Vector& y() const { return y_; }
    int n() const { return static_cast<int>(x_.rows()); }
    int d() const { return static_cast<int>(x_.cols()); }
    // X^T X / n
    const Matrix& q() const { return q_; }
    const Matrix& gram() const { return gram_; }
    const Vector& xty() const { return xty_; }
    // Largest eigenvalue of X^T X.
    double lipschitz() const { return lipschitz_; }

    double loss(const Vector& w) const { return 0.5 * (y_ - x_ * w).squaredNorm(); }

private:
    Matrix x_;
    Vector y_;
    Matrix q_;
    Matrix gram_;
    Vector xty_;
    double lipschitz_;
};

Vector ols(const RegressionProblem& problem);

struct FitOptions {
    double tol = 1e-7;
    int max_iterations = 50000;
    bool record_history = false;
    // Evaluate the final objective (an extra envelope evaluation).
    bool compute_objective = true;
};

struct FitResult {
    Vector w;
    double objective = kInf;
    int iterations = 0;
    double residual = kInf;
    bool converged = false;
    std::vector<double> history;
};

// argmin_w (1/2)||y - X w||^2 + lambda Phi(w)
FitResult fit(const RegressionProblem& problem, const Penalty& penalty, double lambda,
              const FitOptions& options = {}, const Vector* warm_start = nullptr,
              ProxWorkspace* workspace = nullptr);

enum class PilotKind { ols, ones, supplied };

struct AdaptiveConfig {
    double alpha = 0.3;
    PilotKind pilot = PilotKind::ols;
    Vector supplied;
};

PilotKind parse_pilot(std::string_view text);
Vector pilot_estimate(const RegressionProblem& problem, const AdaptiveConfig& config);
// |w0|^{alpha - 1}; zero pilot entries give +inf (coordinate eliminated).
Vector adaptive_weights(const Vector& w0, double alpha);

// Fits the penalty reweighted by adaptive_weights(pilot).
FitResult fit_adaptive(const RegressionProblem& problem, const Penalty& penalty, double lambda,
                       const AdaptiveConfig& config, const FitOptions& options = {});

struct MajorizerValues {
    // Phi(|w|^alpha)
    double lhs = 0.0;
    // (1 - alpha) Phi(|w0|^alpha) + alpha Phi(|w0|^{alpha-1} * |w|)
    double rhs = 0.0;
};

MajorizerValues majorizer(const Penalty& penalty, const Vector& w, const Vector& w0, double alpha);

// {i : |w_i| > tau * max(1, ||w||_inf)}
SupportSet support_of(const Vector& w, double tau = 1e-6);
double estimation_error(const Vector& estimate, const Vector& truth);

struct PathOptions {
    int points = 40;
    double lambda_min = 1e-6;
    double lambda_max = 1e3;
    double tau = 1e-6;
    FitOptions fit;
};

// Strictly increasing log-spaced grid.
std::vector<double> lambda_grid(const PathOptions& options);

struct PathPoint {
    double lambda = 0.0;
    Vector w;
    SupportSet support;
    bool ok = true;
    bool converged = true;
    std::string error;
    std::optional<int> hamming;
    std::optional<double> est_error;
};

struct PathResult {
    // Ordered by increasing lambda.
    std::vector<PathPoint> points;
};

// Solves from the largest lambda down with warm starts. Failures are recorded
// per point and do not abort the path.
PathResult regularization_path(const RegressionProblem& problem, const Penalty& penalty,
                               const PathOptions& options = {}, const Vector* truth = nullptr);

struct Theorem1Report {
    int trials = 0;
    int passed = 0;
    std::vector<double> margins;
    double pass_fraction() const { return trials ? static_cast<double>(passed) / trials : 0.0; }
};

// Fits each problem and checks that the estimate is decomposable with respect
// to its own support, i.e. margin > tol.
Theorem1Report theorem1_check(std::span<const RegressionProblem> problems, const Penalty& penalty, double lambda,
                              double tol = 1e-7);

} // namespace combipen
