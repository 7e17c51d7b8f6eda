#pragma once

#include "combipen/atoms.hpp"
#include "combipen/common.hpp"
#include "combipen/set_function.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace combipen {

enum class PenaltyKind { homogeneous, non_homogeneous };

PenaltyKind parse_penalty_kind(std::string_view text);  // hom | nonhom
double parse_exponent(std::string_view text);           // number > 1 or inf

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::non_homogeneous;
    double p = kInf;
    // Coordinate weights c; the penalty is evaluated at c * |w|, with
    // inf * 0 = 0.
    std::optional<Vector> weights;
    // (mu, lambda_s) for non-homogeneous p < inf; defaults to (1/q, 1/p).
    std::optional<std::pair<double, double>> scale;

    bool homogeneous() const { return kind == PenaltyKind::homogeneous; }
    bool infinite() const { return std::isinf(p); }
    double q() const { return infinite() ? 1.0 : p / (p - 1.0); }
    double mu() const;
    double lambda_s() const;
    void validate(int d) const;
    std::string describe() const;
};

struct EnvelopeOptions {
    double gap_tol = 1e-8;
    double abs_gap_tol = 0.0;
    int max_iterations = 100000;
};

struct CoverCertificate {
    double value = 0.0;
    // One weight per atom in collection order.
    Vector alpha;
    Vector eta;
    // False when the support is not covered or w lies outside the domain;
    // value is then +inf and note says why.
    bool feasible = true;
    std::string note;
    // Row multipliers of the cover constraints (p = inf only) and of the
    // simplex row (non-homogeneous p = inf only).
    Vector kappa;
    double simplex_dual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct DualCertificate {
    Vector kappa;
    double offset = 0.0;
    double value = 0.0;
    double primal = 0.0;
    double gap = 0.0;
};

// c * |w| for the spec's weights.
Vector weighted_magnitude(const PenaltySpec& spec, const Vector& w);

CoverCertificate evaluate_envelope(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                   const EnvelopeOptions& options = {});

CoverCertificate omega_inf(const Vector& w, const AtomCollection& atoms);
CoverCertificate theta_inf(const Vector& w, const AtomCollection& atoms);
CoverCertificate omega_p(const Vector& w, const AtomCollection& atoms, double p);
CoverCertificate theta_p(const Vector& w, const AtomCollection& atoms, double p,
                         std::optional<std::pair<double, double>> scale = std::nullopt);

// Greedy evaluation at |w|. F must be finite.
double lovasz_extension(const SetFunction& f, const Vector& w);

// sum_i |w_i| if |w_i| <= 1 else (w_i^2 + 1) / 2.
double berhu(const Vector& w);

// kappa^{1/q} |w| if |w| <= kappa^{1/p}, else |w|^p / p + kappa / q.
double psi(double kappa, double w, double p);

DualCertificate dual_certificate(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                 const CoverCertificate& primal);

// Danskin subgradient at w from a converged certificate.
Vector subgradient(const PenaltySpec& spec, const Vector& w, const CoverCertificate& cert);

// Set function A -> Omega_inf(1_A) (homogeneous) or Theta_inf(1_A).
SetFunction lce(const AtomCollection& atoms, PenaltyKind kind);

struct MarginReport {
    double margin = kInf;
    // Coordinate (1-based) attaining the minimum; 0 when J = V.
    int coordinate = 0;
    bool from_dual = true;
};

// Smallest one-sided directional derivative of the penalty at w along e_i,
// i outside J. Requires supp(w) within J.
MarginReport decomposability_margin(const PenaltySpec& spec, const AtomCollection& atoms, const Vector& w,
                                    const SupportSet& j, double tol = 1e-7);

struct BallGrid {
    int dim = 0;
    Matrix points;  // one row per grid point
    Vector values;
};

// Penalty values on the uniform grid [-radius, radius]^d, d in {1, 2, 3}.
BallGrid ball_grid(const PenaltySpec& spec, const AtomCollection& atoms, double radius, int resolution);
void write_grid_csv(std::ostream& out, const BallGrid& grid);

} // namespace combipen
