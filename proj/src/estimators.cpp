#include "combipen/estimators.hpp"

#include "combipen/numerics/fista.hpp"
#include "combipen/numerics/linalg.hpp"

#include <algorithm>

namespace combipen {

RegressionProblem::RegressionProblem(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    require(x_.rows() == y_.size(), "RegressionProblem: X and y differ in row count");
    require(x_.cols() >= 1, "RegressionProblem: at least one feature required");
    require(x_.rows() >= x_.cols(), "RegressionProblem: n >= d required");
    require(x_.allFinite() && y_.allFinite(), "RegressionProblem: data must be finite");
    gram_ = x_.transpose() * x_;
    q_ = gram_ / static_cast<double>(x_.rows());
    require(numerics::min_eigenvalue(q_) > 1e-10, "RegressionProblem: X^T X / n is not positive definite");
    xty_ = x_.transpose() * y_;
    lipschitz_ = numerics::lambda_max_gram(x_);
}

Vector ols(const RegressionProblem& problem) {
    Vector w = numerics::cholesky_solve(problem.gram(), problem.xty());
    // One step of iterative refinement.
    const Vector r = problem.xty() - problem.gram() * w;
    w += numerics::cholesky_solve(problem.gram(), r);
    return w;
}

FitResult fit(const RegressionProblem& problem, const Penalty& penalty, double lambda, const FitOptions& options,
              const Vector* warm_start, ProxWorkspace* workspace) {
    require(penalty.dim() == problem.d(), "fit: penalty and design differ in dimension");
    require(lambda >= 0.0 && std::isfinite(lambda), "fit: lambda must be finite and nonnegative");
    ProxWorkspace local;
    ProxWorkspace* ws = workspace ? workspace : &local;

    numerics::SmoothPart smooth;
    smooth.value = [&](const Vector& w) { return problem.loss(w); };
    smooth.gradient = [&](const Vector& w) -> Vector { return problem.gram() * w - problem.xty(); };
    smooth.lipschitz = 1.01 * problem.lipschitz();
    const numerics::ProxOperator prox = [&](const Vector& v, double t) -> Vector {
        if (lambda == 0.0) return v;
        return penalty.prox(v, lambda * t, ws);
    };

    numerics::FistaOptions fo;
    fo.tol = options.tol;
    fo.max_iterations = options.max_iterations;
    fo.record_history = options.record_history;
    if (options.record_history) fo.nonsmooth = [&](const Vector& w) { return lambda * penalty.value(w); };

    Vector init = warm_start ? *warm_start : Vector::Zero(problem.d());
    if (penalty.spec().weights) {
        for (int j = 0; j < problem.d(); ++j)
            if (std::isinf((*penalty.spec().weights)[j])) init[j] = 0.0;
    }

    auto res = numerics::fista(smooth, prox, init, fo);
    FitResult out;
    out.w = std::move(res.point);
    out.iterations = res.iterations;
    out.residual = res.residual;
    out.converged = res.converged;
    out.history = std::move(res.history);
    if (options.compute_objective) out.objective = problem.loss(out.w) + (lambda > 0.0 ? lambda * penalty.value(out.w) : 0.0);
    return out;
}

PilotKind parse_pilot(std::string_view text) {
    if (text == "ols") return PilotKind::ols;
    if (text == "ones") return PilotKind::ones;
    if (text == "supplied") return PilotKind::supplied;
    throw InvalidArgument("unknown pilot '" + std::string(text) + "' (ols|ones|supplied)");
}

Vector pilot_estimate(const RegressionProblem& problem, const AdaptiveConfig& config) {
    switch (config.pilot) {
    case PilotKind::ols: return ols(problem);
    case PilotKind::ones: return Vector::Ones(problem.d());
    case PilotKind::supplied:
        require(config.supplied.size() == problem.d(), "supplied pilot has the wrong length");
        return config.supplied;
    }
    throw InvalidArgument("invalid pilot kind");
}

Vector adaptive_weights(const Vector& w0, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "adaptive alpha must lie in (0, 1)");
    Vector c(w0.size());
    for (Eigen::Index j = 0; j < w0.size(); ++j) {
        const double a = std::abs(w0[j]);
        c[j] = a == 0.0 ? kInf : std::pow(a, alpha - 1.0);
    }
    return c;
}

FitResult fit_adaptive(const RegressionProblem& problem, const Penalty& penalty, double lambda,
                       const AdaptiveConfig& config, const FitOptions& options) {
    const Vector c = adaptive_weights(pilot_estimate(problem, config), config.alpha);
    return fit(problem, penalty.with_weights(c), lambda, options);
}

MajorizerValues majorizer(const Penalty& penalty, const Vector& w, const Vector& w0, double alpha) {
    require(w.size() == w0.size() && w.size() == penalty.dim(), "majorizer: dimension mismatch");
    require(alpha > 0.0 && alpha < 1.0, "majorizer: alpha must lie in (0, 1)");
    const Vector wa = w.cwiseAbs().array().pow(alpha).matrix();
    const Vector w0a = w0.cwiseAbs().array().pow(alpha).matrix();
    const Vector c = adaptive_weights(w0, alpha);
    MajorizerValues out;
    out.lhs = penalty.value(wa);
    out.rhs = (1.0 - alpha) * penalty.value(w0a) + alpha * penalty.with_weights(c).value(w);
    return out;
}

SupportSet support_of(const Vector& w, double tau) {
    const auto d = static_cast<int>(w.size());
    SupportSet s(d);
    if (d == 0) return s;
    const double thr = tau * std::max(1.0, w.cwiseAbs().maxCoeff());
    for (int j = 0; j < d; ++j)
        if (std::abs(w[j]) > thr) s.insert(j + 1);
    return s;
}

double estimation_error(const Vector& estimate, const Vector& truth) {
    require(estimate.size() == truth.size(), "estimation_error: dimension mismatch");
    return (estimate - truth).norm();
}

std::vector<double> lambda_grid(const PathOptions& options) {
    require(options.points >= 1, "lambda grid needs at least one point");
    require(options.lambda_min > 0.0 && options.lambda_max >= options.lambda_min, "invalid lambda range");
    if (options.points == 1) return {options.lambda_max};
    require(options.lambda_max > options.lambda_min, "lambda grid must be strictly increasing");
    std::vector<double> grid(static_cast<std::size_t>(options.points));
    const double lo = std::log10(options.lambda_min);
    const double hi = std::log10(options.lambda_max);
    for (int k = 0; k < options.points; ++k)
        grid[static_cast<std::size_t>(k)] = std::pow(10.0, lo + (hi - lo) * k / (options.points - 1));
    return grid;
}

PathResult regularization_path(const RegressionProblem& problem, const Penalty& penalty,
                               const PathOptions& options, const Vector* truth) {
    const auto grid = lambda_grid(options);
    PathResult out;
    out.points.resize(grid.size());
    ProxWorkspace ws;
    Vector warm = Vector::Zero(problem.d());
    FitOptions fo = options.fit;
    fo.compute_objective = false;
    for (std::size_t k = grid.size(); k-- > 0;) {
        auto& pt = out.points[k];
        pt.lambda = grid[k];
        try {
            auto res = fit(problem, penalty, pt.lambda, fo, &warm, &ws);
            pt.w = std::move(res.w);
            pt.converged = res.converged;
            warm = pt.w;
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
            pt.w = warm;
            ws = ProxWorkspace{};
        }
        pt.support = support_of(pt.w, options.tau);
        if (truth) {
            pt.hamming = hamming(pt.support, support_of(*truth, options.tau));
            pt.est_error = estimation_error(pt.w, *truth);
        }
    }
    return out;
}

Theorem1Report theorem1_check(std::span<const RegressionProblem> problems, const Penalty& penalty, double lambda,
                              double tol) {
    Theorem1Report report;
    for (const auto& problem : problems) {
        const auto res = fit(problem, penalty, lambda);
        const auto j = support_of(res.w);
        Vector w = Vector::Zero(problem.d());
        for (int i : j.members()) w[i - 1] = res.w[i - 1];
        const auto m = decomposability_margin(penalty.spec(), penalty.atoms(), w, j, tol);
        ++report.trials;
        report.margins.push_back(m.margin);
        if (m.margin > tol) ++report.passed;
    }
    return report;
}

} // namespace combipen
