#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace combipen {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Extended reals use IEEE +inf as the sentinel: it dominates addition and
// compares above every finite value.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Raised when an exhaustive routine is asked to enumerate a ground set that
// is too large.
class SizeLimitExceeded : public Error {
public:
    using Error::Error;
};

// Raised by iterative solvers that hit their iteration budget or diverge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

inline void require_ground_size(int d, int limit, const char* what) {
    if (d > limit)
        throw SizeLimitExceeded(std::string(what) + ": ground set of size " + std::to_string(d) +
                                " exceeds the enumeration limit " + std::to_string(limit));
}

// c * x with the convention inf * 0 = 0, used for coordinate weights.
inline double weighted_abs(double c, double x) {
    const double a = std::abs(x);
    if (a == 0.0) return 0.0;
    return c * a;
}

} // namespace combipen
