#pragma once

#include "combipen/common.hpp"

#include <functional>
#include <vector>

namespace combipen::numerics {

struct SmoothPart {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    // Initial Lipschitz estimate; backtracking increases it when needed.
    double lipschitz = 1.0;
};

// prox(v, t) = argmin_z (1/2)||z - v||^2 + t g(z)
using ProxOperator = std::function<Vector(const Vector&, double)>;

struct FistaOptions {
    // Stop when ||w - prox(w - grad/L)|| <= tol * (1 + ||w||).
    double tol = 1e-7;
    int max_iterations = 50000;
    // Optional nonsmooth value, used only to record the objective history.
    std::function<double(const Vector&)> nonsmooth;
    bool record_history = false;
};

struct FistaResult {
    Vector point;
    int iterations = 0;
    double residual = kInf;
    double lipschitz = 0.0;
    bool converged = false;
    // Best-so-far objective per iteration (when recorded).
    std::vector<double> history;
};

// Accelerated proximal gradient with backtracking and gradient-based
// adaptive restart. Throws ConvergenceError on non-finite iterates.
FistaResult fista(const SmoothPart& smooth, const ProxOperator& prox, const Vector& init,
                  const FistaOptions& options = {});

} // namespace combipen::numerics
