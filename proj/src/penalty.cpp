#include "combipen/penalty.hpp"

#include "moment.hpp"

#include <algorithm>

namespace combipen {

Penalty::Penalty(PenaltySpec spec, std::shared_ptr<const AtomCollection> atoms, std::string name)
    : spec_(std::move(spec)), atoms_(std::move(atoms)), name_(std::move(name)) {
    require(atoms_ != nullptr, "Penalty: atoms required");
    spec_.validate(atoms_->ground_size());
    if (!spec_.infinite() && !spec_.homogeneous())
        require(atoms_->monotone() != Tri::no, "Penalty: non-homogeneous p < inf needs a monotone F");
    route_ = spec_.homogeneous() && atoms_->l1_weights() ? Route::weighted_l1 : Route::moment;
    if (name_.empty()) name_ = spec_.describe();
}

double Penalty::value(const Vector& w) const {
    require(w.size() == dim(), "Penalty::value: dimension mismatch");
    if (route_ == Route::weighted_l1) {
        const auto& f = *atoms_->l1_weights();
        const Vector u = weighted_magnitude(spec_, w);
        const double q = spec_.q();
        double acc = 0.0;
        for (int j = 0; j < dim(); ++j)
            if (u[j] != 0.0) acc += std::pow(f[static_cast<std::size_t>(j)], 1.0 / q) * u[j];
        return acc;
    }
    return evaluate_envelope(spec_, *atoms_, w).value;
}

CoverCertificate Penalty::certificate(const Vector& w) const { return evaluate_envelope(spec_, *atoms_, w); }

Vector Penalty::prox(const Vector& v, double t, ProxWorkspace* workspace, const ProxOptions& options) const {
    require(v.size() == dim(), "Penalty::prox: dimension mismatch");
    require(t > 0.0, "Penalty::prox: step must be positive");
    const int d = dim();
    const Vector c = spec_.weights ? *spec_.weights : Vector::Ones(d);
    Vector z = Vector::Zero(d);

    if (route_ == Route::weighted_l1) {
        const auto& f = *atoms_->l1_weights();
        const double q = spec_.q();
        for (int j = 0; j < d; ++j) {
            if (std::isinf(c[j])) continue;
            const double thr = t * c[j] * std::pow(f[static_cast<std::size_t>(j)], 1.0 / q);
            const double a = std::abs(v[j]) - thr;
            if (a > 0.0) z[j] = v[j] > 0.0 ? a : -a;
        }
        return z;
    }

    Vector b = v.cwiseAbs();
    for (int j = 0; j < d; ++j)
        if (std::isinf(c[j])) b[j] = 0.0;
    const double half_sq = 0.5 * b.squaredNorm();
    if (half_sq == 0.0) {
        if (workspace) workspace->alpha.clear();
        return z;
    }

    const auto mode = spec_.homogeneous() ? detail::MomentMode::cone : detail::MomentMode::simplex;
    double radius = 1.0;
    if (spec_.homogeneous()) {
        // Any cover of c * |v| bounds the envelope at the prox point.
        const double q = spec_.q();
        double cover = 0.0;
        for (int j = 0; j < d; ++j)
            if (b[j] > 0.0) cover += c[j] * b[j] * std::pow(atoms_->cheapest_cover(j + 1), 1.0 / q);
        radius = std::min(half_sq / t, cover) * (1.0 + 1e-9);
    }

    numerics::FrankWolfeOptions fw;
    fw.gap_tol = 0.0;
    fw.abs_gap_tol = options.gap_tol * std::max(1.0, half_sq);
    fw.max_iterations = options.max_iterations;
    static const std::vector<std::pair<int, double>> kNoInit;
    const auto& init = workspace ? workspace->alpha : kNoInit;

    detail::MomentSolution sol;
    if (spec_.infinite()) {
        const detail::ClippedQuadratic model(b, c);
        sol = detail::solve_clipped_prox(*atoms_, mode, radius, model, t, init, fw);
        for (int j = 0; j < d; ++j) z[j] = std::copysign(model.shrunk(j, sol.eta[j]), v[j]);
    } else {
        const double ls = spec_.homogeneous() ? 1.0 / spec_.p : spec_.lambda_s();
        const double mu = spec_.mu();
        Vector a(d);
        for (int j = 0; j < d; ++j) a[j] = std::isinf(c[j]) ? kInf : t * ls * std::pow(c[j], spec_.p);
        const detail::MoreauPower model(b, a, spec_.p);
        sol = detail::solve_moment(*atoms_, mode, radius, model, t * mu, init, fw);
        for (int j = 0; j < d; ++j) z[j] = std::copysign(model.minimizer(j, sol.eta[j]), v[j]);
    }
    for (int j = 0; j < d; ++j)
        if (b[j] == 0.0) z[j] = 0.0;
    if (workspace) {
        workspace->alpha = sol.alpha;
        workspace->fw_iterations += sol.iterations;
        if (!sol.converged) ++workspace->unconverged;
    }
    return z;
}

Penalty Penalty::with_weights(Vector c) const {
    PenaltySpec spec = spec_;
    spec.weights = std::move(c);
    return Penalty(std::move(spec), atoms_, name_);
}

Penalty make_named_penalty(std::string_view name, int d) {
    const auto spec = [](PenaltyKind k) { return PenaltySpec{k, kInf, std::nullopt, std::nullopt}; };
    if (name == "l1")
        return Penalty(spec(PenaltyKind::homogeneous),
                       std::make_shared<const AtomCollection>(atoms_intervals(make_range(d))), "l1");
    if (name == "theta_inf_range")
        return Penalty(spec(PenaltyKind::non_homogeneous),
                       std::make_shared<const AtomCollection>(atoms_intervals(make_range(d))), "theta_inf_range");
    if (name == "group_l1_linf_modified_range")
        return Penalty(spec(PenaltyKind::homogeneous),
                       std::make_shared<const AtomCollection>(atoms_intervals(make_modified_range(d))),
                       "group_l1_linf_modified_range");
    if (name == "lasso") {
        std::vector<Atom> singletons;
        for (int j = 1; j <= d; ++j) singletons.push_back({SupportSet(d, {j}), 1.0});
        return Penalty(spec(PenaltyKind::homogeneous),
                       std::make_shared<const AtomCollection>(d, std::move(singletons), Tri::yes), "lasso");
    }
    throw InvalidArgument("unknown penalty '" + std::string(name) +
                          "' (l1|theta_inf_range|group_l1_linf_modified_range|lasso)");
}

double group_linf_modified_range(const Vector& w) {
    const auto d = w.size();
    double acc = 0.0, run = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        run = std::max(run, std::abs(w[k]));
        acc += run;
    }
    run = 0.0;
    for (Eigen::Index k = d - 1; k >= 1; --k) {
        run = std::max(run, std::abs(w[k]));
        acc += run;
    }
    return acc;
}

} // namespace combipen
