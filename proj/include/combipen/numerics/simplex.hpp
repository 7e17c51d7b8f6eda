#pragma once

#include "combipen/common.hpp"

#include <vector>

namespace combipen::numerics {

enum class Sense { less_equal, equal, greater_equal };

// min c^T x  s.t.  A x (sense) b,  x_j >= 0 or free.
struct LinearProgram {
    Vector costs;
    Matrix a;
    Vector b;
    std::vector<Sense> senses;
    // Empty means every variable is nonnegative.
    std::vector<bool> free;

    void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = kInf;
    Vector x;
    // Row multipliers y with c - A^T y >= 0 on nonnegative variables;
    // y >= 0 on >= rows, y <= 0 on <= rows.
    Vector duals;
    int pivots = 0;
};

// Two-phase dense tableau simplex with Bland's rule.
LpResult simplex_solve(const LinearProgram& lp);

} // namespace combipen::numerics
