#pragma once

#include "combipen/common.hpp"

namespace combipen::numerics {

// Solves Q x = b for symmetric positive definite Q; throws InvalidArgument
// when the Cholesky factorization fails.
Vector cholesky_solve(const Matrix& q, const Vector& b);

// Largest eigenvalue of X^T X by power iteration (at most 20 steps, stops at
// 1e-6 relative change). Deterministic start vector.
double lambda_max_gram(const Matrix& x);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& q);

} // namespace combipen::numerics
