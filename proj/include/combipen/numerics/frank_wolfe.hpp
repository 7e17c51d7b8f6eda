#pragma once

#include "combipen/common.hpp"

#include <optional>
#include <vector>

namespace combipen::numerics {

// Finite vertex set of a polytope, addressed by index. Vertices need not be
// materialized; the solver only needs inner products, a linear minimization
// oracle and axpy.
class VertexSet {
public:
    virtual ~VertexSet() = default;
    virtual int dim() const = 0;
    virtual double dot(int vertex, const Vector& g) const = 0;
    virtual int argmin_dot(const Vector& g) const = 0;
    // x += a * vertex
    virtual void axpy(int vertex, double a, Vector& x) const = 0;
};

class SmoothObjective {
public:
    virtual ~SmoothObjective() = default;
    // May return +inf outside the domain.
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
    // Minimizer of value(x + s * dir) over s in [0, s_max]. The default
    // bisects the directional derivative.
    virtual double line_search(const Vector& x, const Vector& dir, double s_max) const;
};

struct ActiveAtom {
    int vertex = 0;
    double weight = 0.0;
};

struct FrankWolfeOptions {
    double gap_tol = 1e-8;
    // Stop when gap <= max(abs_gap_tol, gap_tol * max(1, |f|)).
    double abs_gap_tol = 0.0;
    int max_iterations = 20000;
};

struct FrankWolfeResult {
    Vector point;
    std::vector<ActiveAtom> active;
    double value = kInf;
    double gap = kInf;
    int iterations = 0;
    bool converged = false;
};

// Away-step Frank-Wolfe over conv(vertices) started from a convex
// combination of vertices (weights must sum to 1).
FrankWolfeResult frank_wolfe(const SmoothObjective& f, const VertexSet& vertices,
                             std::vector<ActiveAtom> init, const FrankWolfeOptions& options = {});

} // namespace combipen::numerics
