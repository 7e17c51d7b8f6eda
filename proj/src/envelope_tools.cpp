#include "combipen/envelopes.hpp"

#include <algorithm>
#include <numeric>
#include <cstdio>
#include <ostream>

namespace combipen {

double lovasz_extension(const SetFunction& f, const Vector& w) {
    const int d = f.ground_size();
    require(w.size() == d, "lovasz_extension: dimension mismatch");
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(w[a]) > std::abs(w[b]); });
    SupportSet prefix(d);
    double prev = 0.0, acc = 0.0;
    for (int j : order) {
        prefix.insert(j + 1);
        const double cur = f(prefix);
        require(std::isfinite(cur), "lovasz_extension: F must be finite");
        acc += std::abs(w[j]) * (cur - prev);
        prev = cur;
    }
    return acc;
}

double berhu(const Vector& w) {
    double acc = 0.0;
    for (double x : w) {
        const double a = std::abs(x);
        acc += a <= 1.0 ? a : 0.5 * (a * a + 1.0);
    }
    return acc;
}

namespace {

// min over eta in [0, 1] of lambda_s u^p / eta^{p-1} + mu kappa eta.
double psi_scaled(double kappa, double u, double p, double mu, double lambda_s) {
    if (u == 0.0) return 0.0;
    if (kappa <= 0.0) return lambda_s * std::pow(u, p);
    const double theta = std::pow(lambda_s * (p - 1.0) * std::pow(u, p) / (mu * kappa), 1.0 / p);
    if (theta <= 1.0) return lambda_s * std::pow(u, p) / std::pow(theta, p - 1.0) + mu * kappa * theta;
    return lambda_s * std::pow(u, p) + mu * kappa;
}

// Slope at 0+ of u -> psi_scaled(kappa, u).
double psi_slope(double kappa, double p, double mu, double lambda_s) {
    if (kappa <= 0.0) return 0.0;
    const double r = std::pow(lambda_s * (p - 1.0) / (mu * kappa), 1.0 / p);
    return lambda_s / std::pow(r, p - 1.0) + mu * kappa * r;
}

// min over atoms of F(S) - kappa(S).
double min_slack(const AtomCollection& atoms, const Vector& kappa) {
    double best = kInf;
    atoms.for_each_sum(kappa, [&](int i, double s) { best = std::min(best, atoms[i].value - s); });
    return best;
}

// max over atoms of kappa(S) / F(S).
double max_load(const AtomCollection& atoms, const Vector& kappa) {
    double best = 0.0;
    atoms.for_each_sum(kappa, [&](int i, double s) { best = std::max(best, s / atoms[i].value); });
    return best;
}

double weight_of(const PenaltySpec& spec, int j) { return spec.weights ? (*spec.weights)[j] : 1.0; }

} // namespace

double psi(double kappa, double w, double p) {
    require(p > 1.0, "psi: p must exceed 1");
    require(kappa >= 0.0, "psi: kappa must be nonnegative");
    if (std::isinf(p)) return kappa * std::abs(w);
    const double q = p / (p - 1.0);
    const double a = std::abs(w);
    if (a <= std::pow(kappa, 1.0 / p)) return std::pow(kappa, 1.0 / q) * a;
    return std::pow(a, p) / p + kappa / q;
}

DualCertificate dual_certificate(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                 const CoverCertificate& primal) {
    require(primal.feasible, "dual_certificate: primal certificate is infeasible");
    const Vector u = weighted_magnitude(spec, w);
    const int d = atoms.ground_size();
    DualCertificate out;
    out.primal = primal.value;
    out.kappa = Vector::Zero(d);

    if (spec.infinite()) {
        out.kappa = primal.kappa;
    } else {
        const double p = spec.p;
        for (int j = 0; j < d; ++j) {
            if (u[j] == 0.0) continue;
            if (!(primal.eta[j] > 0.0)) throw Error("dual_certificate: eta vanishes on the support");
            const double r = std::pow(u[j] / primal.eta[j], p);
            out.kappa[j] = spec.homogeneous() ? r : spec.lambda_s() * (p - 1.0) / spec.mu() * r;
        }
    }

    if (spec.homogeneous()) {
        const double load = max_load(atoms, out.kappa);
        if (load > 1.0) out.kappa /= load;
        out.offset = 0.0;
        const double q = spec.q();
        double v = 0.0;
        for (int j = 0; j < d; ++j) v += std::pow(out.kappa[j], 1.0 / q) * u[j];
        out.value = v;
    } else {
        out.offset = std::min(0.0, min_slack(atoms, out.kappa));
        if (spec.infinite()) {
            out.value = out.kappa.dot(u) + out.offset;
        } else {
            double v = spec.mu() * out.offset;
            for (int j = 0; j < d; ++j) v += psi_scaled(out.kappa[j], u[j], spec.p, spec.mu(), spec.lambda_s());
            out.value = v;
        }
    }
    out.gap = out.primal - out.value;
    return out;
}

Vector subgradient(const PenaltySpec& spec, const Vector& w, const CoverCertificate& cert) {
    require(cert.feasible, "subgradient: certificate is infeasible");
    const Vector u = weighted_magnitude(spec, w);
    Vector g = Vector::Zero(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (w[j] == 0.0) continue;
        const double c = weight_of(spec, static_cast<int>(j));
        const double sign = w[j] > 0.0 ? 1.0 : -1.0;
        if (spec.infinite()) {
            g[j] = c * sign * cert.kappa[j];
        } else {
            if (!(cert.eta[j] > 0.0)) throw Error("subgradient: eta vanishes on the support");
            const double ls = spec.homogeneous() ? 1.0 / spec.p : spec.lambda_s();
            g[j] = c * sign * ls * spec.p * std::pow(u[j] / cert.eta[j], spec.p - 1.0);
        }
    }
    return g;
}

SetFunction lce(const AtomCollection& atoms, PenaltyKind kind) {
    const int d = atoms.ground_size();
    require_ground_size(d, 14, "lce");
    require(atoms.covers_all(), "lce: atoms must cover the ground set");
    const bool integral = std::all_of(atoms.atoms().begin(), atoms.atoms().end(),
                                      [](const Atom& a) { return a.value == std::round(a.value); });
    const PenaltySpec spec{kind, kInf, std::nullopt, std::nullopt};
    const std::uint64_t n = std::uint64_t{1} << d;
    std::vector<double> values(n, 0.0);
    for (std::uint64_t m = 1; m < n; ++m) {
        Vector w = Vector::Zero(d);
        for (int k = 0; k < d; ++k)
            if (m >> k & 1U) w[k] = 1.0;
        double v = evaluate_envelope(spec, atoms, w).value;
        if (integral && std::isfinite(v) && std::abs(v - std::round(v)) <= 1e-9) v = std::round(v);
        values[m] = v;
    }
    return make_table(d, std::move(values),
                      kind == PenaltyKind::homogeneous ? "lce_homogeneous" : "lce_non_homogeneous");
}

MarginReport decomposability_margin(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                    const SupportSet& j, double tol) {
    const int d = atoms.ground_size();
    require(w.size() == d && j.ground_size() == d, "decomposability_margin: dimension mismatch");
    for (int i = 0; i < d; ++i)
        require(w[i] == 0.0 || j.contains(i + 1), "decomposability_margin: supp(w) must lie in J");
    const auto cert = evaluate_envelope(spec, atoms, w);
    require(cert.feasible, "decomposability_margin: w is outside the penalty domain (" + cert.note + ")");
    const auto dual = dual_certificate(spec, atoms, w, cert);

    EnvelopeOptions tight;
    tight.gap_tol = 0.0;
    tight.abs_gap_tol = 1e-14 * std::max(1.0, cert.value);
    tight.max_iterations = 200000;
    const double base = spec.infinite() ? cert.value : evaluate_envelope(spec, atoms, w, tight).value;
    const auto difference = [&](int i, double delta) {
        Vector v = w;
        v[i] += delta;
        const double fv = evaluate_envelope(spec, atoms, v, tight).value;
        return (fv - base) / delta;
    };

    MarginReport report;
    for (int i = 0; i < d; ++i) {
        if (j.contains(i + 1)) continue;
        double worst = kInf;
        for (int a = 0; a < atoms.size(); ++a) {
            const auto& m = atoms.members(a);
            if (!std::binary_search(m.begin(), m.end(), i)) continue;
            double load = 0.0;
            for (int k : m) load += dual.kappa[k];
            worst = std::min(worst, atoms[a].value - load);
        }
        const double kappa_i = std::max(0.0, worst - dual.offset);
        const double c = weight_of(spec, i);
        double base_slope;
        if (spec.infinite()) base_slope = kappa_i;
        else if (spec.homogeneous()) base_slope = std::pow(kappa_i, 1.0 / spec.q());
        else base_slope = psi_slope(kappa_i, spec.p, spec.mu(), spec.lambda_s());
        double slope = std::isinf(c) ? (base_slope > 0.0 ? kInf : 0.0) : c * base_slope;
        bool used_dual = true;
        if (!(slope > tol) && !std::isinf(c)) {
            const double richardson = (10.0 * difference(i, 1e-5) - difference(i, 1e-4)) / 9.0;
            if (richardson > slope) {
                slope = richardson;
                used_dual = false;
            }
        }
        if (slope < report.margin) {
            report.margin = slope;
            report.coordinate = i + 1;
            report.from_dual = used_dual;
        }
    }
    return report;
}

BallGrid ball_grid(const PenaltySpec& spec, const AtomCollection& atoms, double radius, int resolution) {
    const int dim = atoms.ground_size();
    require(dim >= 1 && dim <= 3, "ball_grid: dimension must be 1, 2 or 3");
    require(resolution >= 2 && resolution <= 201, "ball_grid: resolution must lie in [2, 201]");
    require(radius > 0.0, "ball_grid: radius must be positive");
    const Vector axis = Vector::LinSpaced(resolution, -radius, radius);
    long long total = 1;
    for (int k = 0; k < dim; ++k) total *= resolution;
    BallGrid grid;
    grid.dim = dim;
    grid.points.resize(total, dim);
    grid.values.resize(total);
    for (long long idx = 0; idx < total; ++idx) {
        long long rest = idx;
        Vector w(dim);
        for (int k = dim - 1; k >= 0; --k) {
            w[k] = axis[static_cast<Eigen::Index>(rest % resolution)];
            rest /= resolution;
        }
        grid.points.row(idx) = w.transpose();
        grid.values[idx] = evaluate_envelope(spec, atoms, w).value;
    }
    return grid;
}

void write_grid_csv(std::ostream& out, const BallGrid& grid) {
    for (int k = 0; k < grid.dim; ++k) out << 'x' << (k + 1) << ',';
    out << "value\n";
    char buf[64];
    for (Eigen::Index r = 0; r < grid.points.rows(); ++r) {
        for (int k = 0; k < grid.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.10g,", grid.points(r, k));
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.12g\n", grid.values[r]);
        out << buf;
    }
}

} // namespace combipen
