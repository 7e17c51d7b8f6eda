#include "combipen/envelopes.hpp"

#include "combipen/numerics/simplex.hpp"
#include "moment.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace combipen {

PenaltyKind parse_penalty_kind(std::string_view text) {
    if (text == "hom" || text == "homogeneous") return PenaltyKind::homogeneous;
    if (text == "nonhom" || text == "non-homogeneous" || text == "non_homogeneous")
        return PenaltyKind::non_homogeneous;
    throw InvalidArgument("unknown penalty kind '" + std::string(text) + "' (hom|nonhom)");
}

double parse_exponent(std::string_view text) {
    if (text == "inf" || text == "infinity") return kInf;
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    require(ec == std::errc() && ptr == text.data() + text.size(), "invalid exponent '" + std::string(text) + "'");
    require(p > 1.0, "exponent p must exceed 1");
    return p;
}

double PenaltySpec::mu() const {
    if (scale && !homogeneous()) return scale->first;
    return infinite() ? 1.0 : 1.0 / q();
}

double PenaltySpec::lambda_s() const {
    if (scale && !homogeneous()) return scale->second;
    return infinite() ? 0.0 : 1.0 / p;
}

void PenaltySpec::validate(int d) const {
    require(p > 1.0, "penalty exponent p must exceed 1");
    if (weights) {
        require(weights->size() == d, "penalty weights must have one entry per coordinate");
        for (double c : *weights) require(c > 0.0 && !std::isnan(c), "penalty weights must be positive");
    }
    if (scale) {
        require(!homogeneous() && !infinite(), "a custom scale applies to non-homogeneous p < inf only");
        require(scale->first > 0.0 && scale->second > 0.0, "penalty scale must be positive");
    }
}

std::string PenaltySpec::describe() const {
    std::ostringstream os;
    os << (homogeneous() ? "omega" : "theta") << "_";
    if (infinite()) os << "inf";
    else os << p;
    if (weights) os << " (weighted)";
    return os.str();
}

Vector weighted_magnitude(const PenaltySpec& spec, const Vector& w) {
    Vector u = w.cwiseAbs();
    if (spec.weights) {
        require(spec.weights->size() == w.size(), "weights and w differ in length");
        for (Eigen::Index j = 0; j < w.size(); ++j) u[j] = weighted_abs((*spec.weights)[j], w[j]);
    }
    return u;
}

namespace {

CoverCertificate empty_certificate(const AtomCollection& atoms) {
    CoverCertificate c;
    c.alpha = Vector::Zero(atoms.size());
    c.eta = Vector::Zero(atoms.ground_size());
    c.kappa = Vector::Zero(atoms.ground_size());
    return c;
}

CoverCertificate infeasible(const AtomCollection& atoms, std::string note) {
    auto c = empty_certificate(atoms);
    c.value = kInf;
    c.feasible = false;
    c.note = std::move(note);
    return c;
}

std::vector<int> support_of_magnitude(const Vector& u) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < u.size(); ++j)
        if (u[j] > 0.0) s.push_back(static_cast<int>(j));
    return s;
}

// Domain checks shared by both routes; returns a note when infeasible.
std::optional<std::string> domain_problem(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& u) {
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (u[j] == 0.0) continue;
        if (!std::isfinite(u[j])) return "weighted magnitude is not finite";
        if (!std::isfinite(atoms.cheapest_cover(static_cast<int>(j) + 1))) return "support not covered by atoms";
    }
    if (!spec.homogeneous() && spec.infinite() && u.size() > 0 && u.maxCoeff() > 1.0 + 1e-12)
        return "outside the unit box";
    return std::nullopt;
}

Vector eta_of(const AtomCollection& atoms, const Vector& alpha) {
    Vector eta = Vector::Zero(atoms.ground_size());
    for (int i = 0; i < atoms.size(); ++i)
        if (alpha[i] != 0.0)
            for (int j : atoms.members(i)) eta[j] += alpha[i];
    return eta;
}

double cost_of(const AtomCollection& atoms, const Vector& alpha) {
    double c = 0.0;
    for (int i = 0; i < atoms.size(); ++i) c += alpha[i] * atoms[i].value;
    return c;
}

CoverCertificate lp_envelope(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& u) {
    const auto supp = support_of_magnitude(u);
    auto cert = empty_certificate(atoms);
    if (supp.empty()) return cert;

    std::vector<int> row_of(static_cast<std::size_t>(atoms.ground_size()), -1);
    for (std::size_t r = 0; r < supp.size(); ++r) row_of[static_cast<std::size_t>(supp[r])] = static_cast<int>(r);
    std::vector<int> cols;
    for (int i = 0; i < atoms.size(); ++i) {
        const auto& m = atoms.members(i);
        if (std::any_of(m.begin(), m.end(), [&](int j) { return row_of[static_cast<std::size_t>(j)] >= 0; }))
            cols.push_back(i);
    }

    const bool simplex_row = !spec.homogeneous();
    const auto rows = static_cast<Eigen::Index>(supp.size() + (simplex_row ? 1 : 0));
    numerics::LinearProgram lp;
    lp.costs.resize(static_cast<Eigen::Index>(cols.size()));
    lp.a = Matrix::Zero(rows, static_cast<Eigen::Index>(cols.size()));
    lp.b.resize(rows);
    lp.senses.assign(static_cast<std::size_t>(rows), numerics::Sense::greater_equal);
    for (std::size_t r = 0; r < supp.size(); ++r) lp.b[static_cast<Eigen::Index>(r)] = std::min(u[supp[r]], simplex_row ? 1.0 : kInf);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        lp.costs[col] = atoms[cols[k]].value;
        for (int j : atoms.members(cols[k]))
            if (row_of[static_cast<std::size_t>(j)] >= 0) lp.a(row_of[static_cast<std::size_t>(j)], col) = 1.0;
        if (simplex_row) lp.a(rows - 1, col) = 1.0;
    }
    if (simplex_row) {
        lp.b[rows - 1] = 1.0;
        lp.senses.back() = numerics::Sense::less_equal;
    }

    const auto res = numerics::simplex_solve(lp);
    if (res.status != numerics::LpStatus::optimal) throw Error("cover LP did not reach optimality");
    for (std::size_t k = 0; k < cols.size(); ++k) cert.alpha[cols[k]] = res.x[static_cast<Eigen::Index>(k)];
    cert.eta = eta_of(atoms, cert.alpha);
    cert.value = cost_of(atoms, cert.alpha);
    for (std::size_t r = 0; r < supp.size(); ++r)
        cert.kappa[supp[r]] = std::max(0.0, res.duals[static_cast<Eigen::Index>(r)]);
    if (simplex_row) cert.simplex_dual = std::min(0.0, res.duals[rows - 1]);
    return cert;
}

CoverCertificate fw_envelope(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& u,
                             const EnvelopeOptions& options) {
    const auto supp = support_of_magnitude(u);
    auto cert = empty_certificate(atoms);
    if (supp.empty()) return cert;

    std::vector<int> chosen;
    std::vector<double> count(static_cast<std::size_t>(atoms.ground_size()), 0.0);
    for (int j : supp) chosen.push_back(atoms.cheapest_atom(j + 1));
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    for (int i : chosen)
        for (int j : atoms.members(i)) count[static_cast<std::size_t>(j)] += 1.0;

    const double p = spec.p;
    const double lambda_s = spec.lambda_s();
    const double mu = spec.mu();
    std::vector<std::pair<int, double>> init;
    detail::MomentMode mode = detail::MomentMode::simplex;
    double radius = 1.0;
    if (spec.homogeneous()) {
        double a = 0.0, c = 0.0;
        for (int j : supp) a += std::pow(u[j], p) / std::pow(count[static_cast<std::size_t>(j)], p - 1.0);
        for (int i : chosen) c += atoms[i].value;
        const double s = std::pow(a / c, 1.0 / p);
        const double h0 = lambda_s * a / std::pow(s, p - 1.0) + mu * s * c;
        mode = detail::MomentMode::cone;
        radius = std::max(h0, s * c) * (1.0 + 1e-6);
        for (int i : chosen) init.emplace_back(i, s);
    } else {
        for (int i : chosen) init.emplace_back(i, 1.0 / static_cast<double>(chosen.size()));
    }

    const detail::PowerOverLinear model(u, p, lambda_s);
    numerics::FrankWolfeOptions fw;
    fw.gap_tol = options.gap_tol;
    fw.abs_gap_tol = options.abs_gap_tol;
    fw.max_iterations = options.max_iterations;
    const auto sol = detail::solve_moment(atoms, mode, radius, model, mu, init, fw);

    for (const auto& [i, a] : sol.alpha) cert.alpha[i] = a;
    cert.eta = eta_of(atoms, cert.alpha);
    double value = mu * cost_of(atoms, cert.alpha);
    for (int j : supp) value += model.value(j, cert.eta[j]);
    cert.value = value;
    cert.gap = sol.gap;
    cert.iterations = sol.iterations;
    cert.converged = sol.converged;
    return cert;
}

} // namespace

CoverCertificate evaluate_envelope(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                   const EnvelopeOptions& options) {
    require(w.size() == atoms.ground_size(), "w and atom ground set differ in dimension");
    spec.validate(atoms.ground_size());
    if (!spec.infinite() && !spec.homogeneous())
        require(atoms.monotone() != Tri::no, "the non-homogeneous envelope with p < inf needs a monotone F");
    const Vector u = weighted_magnitude(spec, w);
    if (auto problem = domain_problem(spec, atoms, u)) return infeasible(atoms, *problem);
    return spec.infinite() ? lp_envelope(spec, atoms, u) : fw_envelope(spec, atoms, u, options);
}

CoverCertificate omega_inf(const Vector& w, const AtomCollection& atoms) {
    return evaluate_envelope({PenaltyKind::homogeneous, kInf, std::nullopt, std::nullopt}, atoms, w);
}

CoverCertificate theta_inf(const Vector& w, const AtomCollection& atoms) {
    return evaluate_envelope({PenaltyKind::non_homogeneous, kInf, std::nullopt, std::nullopt}, atoms, w);
}

CoverCertificate omega_p(const Vector& w, const AtomCollection& atoms, double p) {
    return evaluate_envelope({PenaltyKind::homogeneous, p, std::nullopt, std::nullopt}, atoms, w);
}

CoverCertificate theta_p(const Vector& w, const AtomCollection& atoms, double p,
                         std::optional<std::pair<double, double>> scale) {
    return evaluate_envelope({PenaltyKind::non_homogeneous, p, std::nullopt, scale}, atoms, w);
}

} // namespace combipen
