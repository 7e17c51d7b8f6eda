#include "combipen/numerics/fista.hpp"

#include <algorithm>

namespace combipen::numerics {

FistaResult fista(const SmoothPart& smooth, const ProxOperator& prox, const Vector& init,
                  const FistaOptions& options) {
    require(smooth.lipschitz >= 0.0, "fista: invalid Lipschitz estimate");
    FistaResult res;
    double lip = std::max(smooth.lipschitz, 1e-12);
    Vector w = init;
    Vector y = init;
    double t = 1.0;
    double best = kInf;

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        const double fy = smooth.value(y);
        const Vector gy = smooth.gradient(y);
        Vector z;
        for (;;) {
            z = prox(y - gy / lip, 1.0 / lip);
            const Vector diff = z - y;
            const double bound = fy + gy.dot(diff) + 0.5 * lip * diff.squaredNorm();
            const double fz = smooth.value(z);
            if (!std::isfinite(fz)) throw ConvergenceError("fista: non-finite objective");
            if (fz <= bound + 1e-12 * std::max(1.0, std::abs(fz))) break;
            lip *= 2.0;
        }
        if (!z.allFinite()) throw ConvergenceError("fista: non-finite iterate");

        res.residual = (z - y).norm();
        if (options.record_history) {
            const double obj = smooth.value(z) + (options.nonsmooth ? options.nonsmooth(z) : 0.0);
            best = std::min(best, obj);
            res.history.push_back(best);
        }
        if (res.residual <= options.tol * (1.0 + z.norm())) {
            w = std::move(z);
            res.converged = true;
            ++res.iterations;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const bool restart = (y - z).dot(z - w) > 0.0;
        if (restart) {
            t = 1.0;
            y = z;
        } else {
            y = z + ((t - 1.0) / t_next) * (z - w);
            t = t_next;
        }
        w = std::move(z);
    }
    res.point = std::move(w);
    res.lipschitz = lip;
    return res;
}

} // namespace combipen::numerics
