#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool greater(double a, double b) {
    if (std::isinf(b)) return false;
    if (std::isinf(a)) return true;
    return a > b + 1e-12;
}

// Visits every k-subset of {0..n-1}.
void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return;
    for (;;) {
        visit(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

} // namespace

bool monotone(const Table& f, int d) {
    const std::uint64_t n = 1ull << d;
    for (std::uint64_t a = 0; a < n; ++a)
        for (int k = 0; k < d; ++k)
            if (!(a >> k & 1) && f[a | 1ull << k] < f[a]) return false;
    return true;
}

bool submodular(const Table& f, int d) {
    const std::uint64_t n = 1ull << d;
    for (std::uint64_t b = 0; b < n; ++b) {
        for (std::uint64_t a = b;; a = (a - 1) & b) {
            if (!std::isinf(f[a]) && !std::isinf(f[b])) {
                for (int k = 0; k < d; ++k) {
                    if (b >> k & 1) continue;
                    const double ga = f[a | 1ull << k] - f[a];
                    const double gb = f[b | 1ull << k] - f[b];
                    if (gb > ga + 1e-12) return false;
                }
            }
            if (a == 0) break;
        }
    }
    return true;
}

std::optional<double> rho(const Table& f, int d) {
    const std::uint64_t n = 1ull << d;
    double best = 1.0;
    for (std::uint64_t b = 0; b < n; ++b) {
        for (std::uint64_t a = b;; a = (a - 1) & b) {
            for (int k = 0; k < d; ++k) {
                if (b >> k & 1) continue;
                const double ga = f[a | 1ull << k] - f[a];
                const double gb = f[b | 1ull << k] - f[b];
                if (gb > 0) {
                    if (ga <= 0) return std::nullopt;
                    best = std::min(best, ga / gb);
                }
            }
            if (a == 0) break;
        }
    }
    return best;
}

double min_weak_ratio(const Table& f, int d) {
    const std::uint64_t n = 1ull << d;
    double best = inf;
    for (std::uint64_t l = 0; l < n; ++l) {
        for (std::uint64_t s = 1; s < n; ++s) {
            if (s & l) continue;
            const double den = f[l | s] - f[l];
            if (!(den > 0) || std::isinf(f[l | s]) || std::isinf(f[l])) continue;
            double num = 0;
            for (int k = 0; k < d; ++k)
                if (s >> k & 1) num += f[l | 1ull << k] - f[l];
            if (std::isfinite(num)) best = std::min(best, num / den);
        }
    }
    return best;
}

std::vector<std::uint64_t> weak_stable(const Table& f, int d) {
    std::vector<std::uint64_t> out;
    const std::uint64_t n = 1ull << d;
    for (std::uint64_t j = 0; j < n; ++j) {
        if (std::isinf(f[j])) continue;
        bool ok = true;
        for (int k = 0; k < d && ok; ++k)
            if (!(j >> k & 1)) ok = greater(f[j | 1ull << k], f[j]);
        if (ok) out.push_back(j);
    }
    return out;
}

std::vector<std::uint64_t> strong_stable(const Table& f, int d) {
    std::vector<std::uint64_t> out;
    const std::uint64_t n = 1ull << d;
    for (std::uint64_t j = 0; j < n; ++j) {
        if (std::isinf(f[j])) continue;
        bool ok = true;
        for (std::uint64_t a = j; ok; a = (a - 1) & j) {
            for (int k = 0; k < d && ok; ++k)
                if (!(j >> k & 1)) ok = greater(f[a | 1ull << k], f[a]);
            if (a == 0) break;
        }
        if (ok) out.push_back(j);
    }
    return out;
}

Table monotone_closure(const Table& f, int d) {
    const std::uint64_t n = 1ull << d;
    Table out(n, inf);
    for (std::uint64_t a = 0; a < n; ++a)
        for (std::uint64_t s = 0; s < n; ++s)
            if ((s & a) == a) out[a] = std::min(out[a], f[s]);
    return out;
}

double lovasz(const Table& f, int d, const Eigen::VectorXd& w) {
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(w[a]) > std::abs(w[b]); });
    double total = 0;
    std::uint64_t mask = 0;
    double prev = 0;
    for (int k : order) {
        mask |= 1ull << k;
        total += std::abs(w[k]) * (f[mask] - prev);
        prev = f[mask];
    }
    return total;
}

std::optional<double> lp_by_vertices(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    // Stack x >= 0 as -x <= 0 and choose n tight rows at a time.
    const auto m = a.rows();
    const auto n = a.cols();
    Eigen::MatrixXd all(m + n, n);
    Eigen::VectorXd rhs(m + n);
    all << a, -Eigen::MatrixXd::Identity(n, n);
    rhs << b, Eigen::VectorXd::Zero(n);
    std::optional<double> best;
    combinations(static_cast<int>(m + n), static_cast<int>(n), [&](const std::vector<int>& rows) {
        Eigen::MatrixXd sys(n, n);
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            sys.row(i) = all.row(rows[static_cast<std::size_t>(i)]);
            r[i] = rhs[rows[static_cast<std::size_t>(i)]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        if (lu.rank() < n) return;
        const Eigen::VectorXd x = lu.solve(r);
        if (((all * x - rhs).array() > 1e-9).any()) return;
        const double v = c.dot(x);
        if (!best || v < *best) best = v;
    });
    return best;
}

std::optional<double> exhaustive_cover(const std::vector<TinyAtom>& atoms, int d, const Eigen::VectorXd& w,
                                       bool simplex) {
    const auto m = static_cast<Eigen::Index>(atoms.size());
    const Eigen::Index rows = d + (simplex ? 1 : 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, m);
    Eigen::VectorXd b(rows);
    Eigen::VectorXd c(m);
    for (Eigen::Index s = 0; s < m; ++s) {
        c[s] = atoms[static_cast<std::size_t>(s)].value;
        for (int j = 0; j < d; ++j)
            if (atoms[static_cast<std::size_t>(s)].mask >> j & 1) a(j, s) = -1.0;
        if (simplex) a(d, s) = 1.0;
    }
    for (int j = 0; j < d; ++j) b[j] = -std::abs(w[j]);
    if (simplex) b[d] = 1.0;
    return lp_by_vertices(a, b, c);
}

Eigen::MatrixXd biconjugate_on_grid(const std::function<double(double, double)>& f, const Grid2& grid,
                                    double slope_scale) {
    const int n = grid.n;
    Eigen::MatrixXd fv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fv(i, j) = f(grid.at(i), grid.at(j));
    // Slopes of the envelope stay within the range of finite differences; the
    // dual grid covers a multiple of the primal extent.
    const double extent = slope_scale * std::max(std::abs(grid.lo), std::abs(grid.hi));
    Grid2 dual{-extent, extent, n};
    const int m = 4 * n;
    dual.n = m;
    Eigen::MatrixXd conj(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            double best = -inf;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (std::isfinite(fv(i, j)))
                        best = std::max(best, dual.at(a) * grid.at(i) + dual.at(b) * grid.at(j) - fv(i, j));
            conj(a, b) = best;
        }
    }
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double best = -inf;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    best = std::max(best, dual.at(a) * grid.at(i) + dual.at(b) * grid.at(j) - conj(a, b));
            out(i, j) = best;
        }
    }
    return out;
}

Eigen::VectorXd cd_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& c,
                         int sweeps, double tol) {
    const auto d = x.cols();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd r = y;
    const Eigen::VectorXd sq = x.colwise().squaredNorm();
    for (int s = 0; s < sweeps; ++s) {
        double change = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double rho_j = x.col(j).dot(r) + sq[j] * w[j];
            const double thr = lambda * c[j];
            double next = 0;
            if (std::isfinite(thr)) {
                if (rho_j > thr) next = (rho_j - thr) / sq[j];
                else if (rho_j < -thr) next = (rho_j + thr) / sq[j];
            }
            const double delta = next - w[j];
            if (delta != 0) {
                r -= delta * x.col(j);
                w[j] = next;
                change = std::max(change, std::abs(delta));
            }
        }
        if (change < tol) break;
    }
    return w;
}

} // namespace oracle
