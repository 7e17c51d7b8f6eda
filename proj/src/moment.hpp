#pragma once

// Moment-space formulation shared by envelope evaluation and proximal
// operators: points are (eta, cost) in conv{(s_S 1_S, s_S F(S))} plus the
// origin, with s_S = 1 (simplex) or R / F(S) (capped cone).

#include "combipen/atoms.hpp"
#include "combipen/numerics/frank_wolfe.hpp"

#include <vector>

namespace combipen::detail {

enum class MomentMode { simplex, cone };

class MomentVertices final : public numerics::VertexSet {
public:
    MomentVertices(const AtomCollection& atoms, MomentMode mode, double radius = 1.0);

    int dim() const override { return atoms_.ground_size() + 1; }
    double dot(int vertex, const Vector& g) const override;
    int argmin_dot(const Vector& g) const override;
    void axpy(int vertex, double a, Vector& x) const override;

    int zero() const { return atoms_.size(); }
    double scale(int vertex) const;

private:
    const AtomCollection& atoms_;
    MomentMode mode_;
    double radius_;
};

// Separable coordinate terms phi_j(eta_j).
class CoordinateModel {
public:
    virtual ~CoordinateModel() = default;
    virtual double value(int j, double eta) const = 0;
    virtual double deriv(int j, double eta) const = 0;
};

// lambda_s u_j^p / eta^{p-1}, with 0/0 = 0 and a/0 = +inf.
class PowerOverLinear final : public CoordinateModel {
public:
    PowerOverLinear(Vector u, double p, double lambda_s) : u_(std::move(u)), p_(p), lambda_s_(lambda_s) {}
    double value(int j, double eta) const override;
    double deriv(int j, double eta) const override;

private:
    Vector u_;
    double p_;
    double lambda_s_;
};

// (1/2)(b_j - eta / c_j)_+^2 : prox of an l_inf-type envelope.
class ClippedQuadratic final : public CoordinateModel {
public:
    ClippedQuadratic(Vector b, Vector c) : b_(std::move(b)), c_(std::move(c)) {}
    double value(int j, double eta) const override;
    double deriv(int j, double eta) const override;
    double shrunk(int j, double eta) const;
    const Vector& anchor() const { return b_; }
    const Vector& weights() const { return c_; }

private:
    Vector b_;
    Vector c_;
};

// min_z (1/2)(z - b_j)^2 + a_j z^p / eta^{p-1} over z >= 0.
class MoreauPower final : public CoordinateModel {
public:
    MoreauPower(Vector b, Vector a, double p) : b_(std::move(b)), a_(std::move(a)), p_(p) {}
    double value(int j, double eta) const override;
    double deriv(int j, double eta) const override;
    double minimizer(int j, double eta) const;

private:
    Vector b_;
    Vector a_;
    double p_;
};

class SeparableObjective final : public numerics::SmoothObjective {
public:
    SeparableObjective(const CoordinateModel& model, int d, double cost_coef)
        : model_(model), d_(d), cost_coef_(cost_coef) {}
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    double line_search(const Vector& x, const Vector& dir, double s_max) const override;

private:
    double slope(const Vector& x, const Vector& dir, double s) const;

    const CoordinateModel& model_;
    int d_;
    double cost_coef_;
};

struct MomentSolution {
    Vector eta;
    double cost = 0.0;
    // Sparse atom weights (atom index, alpha).
    std::vector<std::pair<int, double>> alpha;
    double value = kInf;
    double gap = kInf;
    int iterations = 0;
    bool converged = false;
};

// Minimizes sum_j phi_j(eta_j) + cost_coef * cost over the moment polytope.
// init holds atom weights alpha; missing mass goes to the origin.
MomentSolution solve_moment(const AtomCollection& atoms, MomentMode mode, double radius,
                            const CoordinateModel& model, double cost_coef,
                            const std::vector<std::pair<int, double>>& init,
                            const numerics::FrankWolfeOptions& options);

// Minimizes sum_j (1/2)(b_j - eta_j / c_j)_+^2 + t * cost. Frank-Wolfe rounds
// alternate with an exact solve of the KKT system on the current atom face,
// accepted once primal and dual feasibility are verified.
MomentSolution solve_clipped_prox(const AtomCollection& atoms, MomentMode mode, double radius,
                                  const ClippedQuadratic& model, double t,
                                  const std::vector<std::pair<int, double>>& init,
                                  const numerics::FrankWolfeOptions& options);

} // namespace combipen::detail
