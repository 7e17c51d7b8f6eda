#include "moment.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace combipen::detail {

MomentVertices::MomentVertices(const AtomCollection& atoms, MomentMode mode, double radius)
    : atoms_(atoms), mode_(mode), radius_(radius) {
    require(radius > 0.0 && std::isfinite(radius), "moment cone radius must be finite and positive");
}

double MomentVertices::scale(int vertex) const {
    if (vertex == zero()) return 0.0;
    return mode_ == MomentMode::simplex ? 1.0 : radius_ / atoms_[vertex].value;
}

double MomentVertices::dot(int vertex, const Vector& g) const {
    if (vertex == zero()) return 0.0;
    double acc = 0.0;
    for (int j : atoms_.members(vertex)) acc += g[j];
    return scale(vertex) * (acc + g[atoms_.ground_size()] * atoms_[vertex].value);
}

int MomentVertices::argmin_dot(const Vector& g) const {
    const int d = atoms_.ground_size();
    const double gm = g[d];
    int best = zero();
    double best_val = 0.0;

    const auto affine = atoms_.interval_affine();
    if (mode_ == MomentMode::simplex && affine) {
        // Minimum-sum interval of g_j + gm * b, plus gm * a.
        const auto [a, b] = *affine;
        double run = 0.0;
        int run_lo = 0;
        for (int hi = 0; hi < d; ++hi) {
            const double e = g[hi] + gm * b;
            if (hi == 0 || run > 0.0) {
                run = e;
                run_lo = hi;
            } else {
                run += e;
            }
            const double val = run + gm * a;
            if (val < best_val) {
                best_val = val;
                best = atoms_.interval_index(run_lo + 1, hi + 1);
            }
        }
        return best;
    }

    atoms_.for_each_sum(g, [&](int i, double sum) {
        const double val = scale(i) * (sum + gm * atoms_[i].value);
        if (val < best_val) {
            best_val = val;
            best = i;
        }
    });
    return best;
}

void MomentVertices::axpy(int vertex, double a, Vector& x) const {
    if (vertex == zero()) return;
    const double s = a * scale(vertex);
    for (int j : atoms_.members(vertex)) x[j] += s;
    x[atoms_.ground_size()] += s * atoms_[vertex].value;
}

double PowerOverLinear::value(int j, double eta) const {
    const double u = u_[j];
    if (u == 0.0) return 0.0;
    if (eta <= 0.0) return kInf;
    return lambda_s_ * std::pow(u, p_) / std::pow(eta, p_ - 1.0);
}

double PowerOverLinear::deriv(int j, double eta) const {
    const double u = u_[j];
    if (u == 0.0) return 0.0;
    if (eta <= 0.0) return -kInf;
    return -lambda_s_ * (p_ - 1.0) * std::pow(u / eta, p_);
}

double ClippedQuadratic::value(int j, double eta) const {
    const double c = c_[j];
    const double r = std::isinf(c) ? b_[j] : std::max(0.0, b_[j] - eta / c);
    return 0.5 * r * r;
}

double ClippedQuadratic::deriv(int j, double eta) const {
    const double c = c_[j];
    if (std::isinf(c)) return 0.0;
    return -std::max(0.0, b_[j] - eta / c) / c;
}

double ClippedQuadratic::shrunk(int j, double eta) const {
    const double c = c_[j];
    if (std::isinf(c)) return 0.0;
    return std::min(b_[j], std::max(0.0, eta) / c);
}

double MoreauPower::minimizer(int j, double eta) const {
    const double b = b_[j];
    const double a = a_[j];
    if (b == 0.0 || std::isinf(a) || eta <= 0.0) return 0.0;
    if (a == 0.0) return b;
    if (p_ == 2.0) return b * eta / (eta + 2.0 * a);
    // z - b + a p (z / eta)^{p-1} = 0 is increasing in z on [0, b].
    double lo = 0.0, hi = b;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * b; ++it) {
        const double z = 0.5 * (lo + hi);
        const double r = z - b + a * p_ * std::pow(z / eta, p_ - 1.0);
        (r < 0.0 ? lo : hi) = z;
    }
    return 0.5 * (lo + hi);
}

double MoreauPower::value(int j, double eta) const {
    const double b = b_[j];
    const double a = a_[j];
    if (b == 0.0) return 0.0;
    if (std::isinf(a) || eta <= 0.0) return 0.5 * b * b;
    if (p_ == 2.0) return a * b * b / (eta + 2.0 * a);
    const double z = minimizer(j, eta);
    return 0.5 * (z - b) * (z - b) + a * std::pow(z, p_) / std::pow(eta, p_ - 1.0);
}

double MoreauPower::deriv(int j, double eta) const {
    const double b = b_[j];
    const double a = a_[j];
    if (b == 0.0 || std::isinf(a)) return 0.0;
    if (a == 0.0) return 0.0;
    if (p_ == 2.0) {
        const double den = std::max(eta, 0.0) + 2.0 * a;
        return -a * b * b / (den * den);
    }
    double ratio;
    if (eta <= 0.0) ratio = std::pow(b / (a * p_), 1.0 / (p_ - 1.0));
    else ratio = minimizer(j, eta) / eta;
    return -a * (p_ - 1.0) * std::pow(ratio, p_);
}

double SeparableObjective::value(const Vector& x) const {
    double acc = cost_coef_ * x[d_];
    for (int j = 0; j < d_; ++j) acc += model_.value(j, x[j]);
    return acc;
}

Vector SeparableObjective::gradient(const Vector& x) const {
    Vector g(d_ + 1);
    for (int j = 0; j < d_; ++j) g[j] = model_.deriv(j, x[j]);
    g[d_] = cost_coef_;
    return g;
}

double SeparableObjective::slope(const Vector& x, const Vector& dir, double s) const {
    double acc = cost_coef_ * dir[d_];
    for (int j = 0; j < d_; ++j) {
        if (dir[j] == 0.0) continue;
        const double eta = x[j] + s * dir[j];
        const double v = model_.deriv(j, eta);
        if (std::isinf(v) && eta <= 0.0) return 1.0;
        acc += v * dir[j];
    }
    return std::isnan(acc) ? 1.0 : acc;
}

double SeparableObjective::line_search(const Vector& x, const Vector& dir, double s_max) const {
    double f_lo = slope(x, dir, 0.0);
    if (f_lo >= 0.0) return 0.0;
    double f_hi = slope(x, dir, s_max);
    if (f_hi <= 0.0) return s_max;
    double lo = 0.0, hi = s_max;
    for (int it = 0; it < 100 && hi - lo > 4e-16 * s_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = slope(x, dir, mid);
        if (f < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    // Secant refinement: exact when the slope is linear on [lo, hi].
    if (std::isfinite(f_lo) && std::isfinite(f_hi) && f_hi > f_lo) {
        const double s = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
        return std::clamp(s, lo, hi);
    }
    return lo;
}

MomentSolution solve_moment(const AtomCollection& atoms, MomentMode mode, double radius,
                            const CoordinateModel& model, double cost_coef,
                            const std::vector<std::pair<int, double>>& init,
                            const numerics::FrankWolfeOptions& options) {
    const MomentVertices vertices(atoms, mode, radius);
    const int d = atoms.ground_size();

    std::vector<numerics::ActiveAtom> start;
    double mass = 0.0;
    for (const auto& [i, alpha] : init) {
        if (!(alpha > 0.0)) continue;
        const double w = mode == MomentMode::simplex ? alpha : alpha * atoms[i].value / radius;
        start.push_back({i, w});
        mass += w;
    }
    if (mass > 1.0) {
        for (auto& a : start) a.weight /= mass;
        mass = 1.0;
    }
    if (mass < 1.0) start.push_back({vertices.zero(), 1.0 - mass});

    const SeparableObjective objective(model, d, cost_coef);
    const auto fw = numerics::frank_wolfe(objective, vertices, std::move(start), options);

    MomentSolution out;
    out.eta = fw.point.head(d);
    out.cost = fw.point[d];
    for (const auto& a : fw.active)
        if (a.vertex != vertices.zero()) out.alpha.emplace_back(a.vertex, a.weight * vertices.scale(a.vertex));
    std::sort(out.alpha.begin(), out.alpha.end());
    out.value = fw.value;
    out.gap = fw.gap;
    out.iterations = fw.iterations;
    out.converged = fw.converged;
    return out;
}

} // namespace combipen::detail


namespace combipen::detail {

namespace {

// Goldfarb-Idnani dual active set on the dual of the clipped prox at a fixed nu:
//   min 1/2 |s - b|^2  s.t.  sum_{j in S} s_j / c_j <= t F(S) + nu,  s >= 0.
// Multipliers of the atom rows are the cover weights. On the simplex nu is then
// moved until the weights sum to one, unless they already sum to at most one at nu = 0.
class DualQp {
public:
    DualQp(const AtomCollection& atoms, MomentMode mode, const ClippedQuadratic& model, double t)
        : atoms_(atoms), b_(model.anchor()), c_(model.weights()), t_(t), d_(atoms.ground_size()),
          simplex_(mode == MomentMode::simplex) {
        inv_c_ = Vector::Zero(d_);
        for (int j = 0; j < d_; ++j)
            if (std::isfinite(c_[j])) inv_c_[j] = 1.0 / c_[j];
        double reach = 0.0;
        for (int j = 0; j < d_; ++j) reach += b_[j] * inv_c_[j];
        tol_ = 1e-12 * (1.0 + reach);
    }

    std::optional<MomentSolution> solve(int max_steps) {
        max_steps_ = max_steps;
        auto at_zero = solve_at(0.0);
        if (!at_zero) return std::nullopt;
        if (!simplex_ || at_zero->total <= 1.0 + 1e-12) return finish(*at_zero);

        double hi_nu = 0.0;
        const Vector kappa = b_.cwiseProduct(inv_c_);
        atoms_.for_each_sum(kappa, [&](int i, double v) { hi_nu = std::max(hi_nu, v - t_ * atoms_[i].value); });
        auto hi = solve_at(hi_nu * (1.0 + 1e-12) + 1e-300);
        if (!hi) return std::nullopt;
        State lo = std::move(*at_zero);
        int side = 0;
        double g_lo = lo.total - 1.0;
        double g_hi = hi->total - 1.0;
        for (int round = 0; round < 200; ++round) {
            if (hi->nu - lo.nu <= 1e-15 * (1.0 + hi->nu)) break;
            const double nu = (lo.nu * g_hi - hi->nu * g_lo) / (g_hi - g_lo);
            auto mid = solve_at(nu);
            if (!mid) return std::nullopt;
            const double g = mid->total - 1.0;
            if (std::abs(g) <= 1e-11) return finish(*mid);
            if (g > 0.0) {
                lo = std::move(*mid);
                g_lo = g;
                if (side == 1) g_hi *= 0.5;
                side = 1;
            } else {
                hi = std::move(mid);
                g_hi = g;
                if (side == -1) g_lo *= 0.5;
                side = -1;
            }
        }
        // Multipliers are not unique at a kink of nu -> sum(alpha); both ends are
        // optimal there, so blend them to put the total at one.
        const double theta = (1.0 - hi->total) / (lo.total - hi->total);
        State blend;
        blend.nu = hi->nu;
        blend.x = hi->x;
        std::map<int, double> merged;
        for (const auto& [i, a] : lo.alpha) merged[i] += theta * a;
        for (const auto& [i, a] : hi->alpha) merged[i] += (1.0 - theta) * a;
        for (const auto& [i, a] : merged) {
            blend.alpha.emplace_back(i, a);
            blend.total += a;
        }
        return finish(blend);
    }

private:
    int atom_count() const { return atoms_.size(); }

    Vector normal(int id) const {
        Vector v = Vector::Zero(d_);
        if (id < atom_count()) {
            for (int j : atoms_.members(id)) v[j] = -inv_c_[j];
        } else {
            v[id - atom_count()] = 1.0;
        }
        return v;
    }

    double offset(int id) const { return id < atom_count() ? -(t_ * atoms_[id].value + nu_) : 0.0; }

    std::pair<int, double> most_violated() const {
        const Vector kappa = x_.cwiseProduct(inv_c_);
        int best = -1;
        double worst = kInf;
        atoms_.for_each_sum(kappa, [&](int i, double s) {
            const double slack = t_ * atoms_[i].value + nu_ - s;
            if (slack < worst) {
                worst = slack;
                best = i;
            }
        });
        for (int j = 0; j < d_; ++j) {
            if (x_[j] < worst) {
                worst = x_[j];
                best = atom_count() + j;
            }
        }
        return {best, worst};
    }

    struct State {
        double nu = 0.0;
        Vector x;
        std::vector<std::pair<int, double>> alpha;
        double total = 0.0;
    };

    std::optional<State> solve_at(double nu) {
        nu_ = nu;
        const Eigen::Index n = d_;
        x_ = b_;
        j_ = Matrix::Identity(n, n);
        r_ = Matrix::Zero(n, n);
        active_.clear();
        u_ = Vector::Zero(n + 1);
        r_norm_ = 1.0;

        int steps = 0;
        for (;;) {
            const auto [p, slack] = most_violated();
            if (slack >= -tol_) break;
            const Vector np = normal(p);
            const double c0 = offset(p);
            u_[static_cast<Eigen::Index>(active_.size())] = 0.0;
            for (;;) {
                if (++steps > max_steps_) return std::nullopt;
                const auto q = static_cast<Eigen::Index>(active_.size());
                const Vector dv = j_.transpose() * np;
                const Vector z = j_.rightCols(n - q) * dv.tail(n - q);
                Vector r(q);
                for (Eigen::Index i = q - 1; i >= 0; --i) {
                    double s = dv[i];
                    for (Eigen::Index k = i + 1; k < q; ++k) s -= r_(i, k) * r[k];
                    r[i] = s / r_(i, i);
                }
                double partial = kInf;
                Eigen::Index drop = -1;
                for (Eigen::Index k = 0; k < q; ++k) {
                    if (r[k] > 0.0 && u_[k] / r[k] < partial) {
                        partial = u_[k] / r[k];
                        drop = k;
                    }
                }
                const double zn = z.dot(np);
                const double sp = np.dot(x_) - c0;
                const double full = z.norm() > 1e-14 && zn > 0.0 ? -sp / zn : kInf;
                const double step = std::min(partial, full);
                if (!std::isfinite(step)) return std::nullopt;
                if (std::isfinite(full)) x_ += step * z;
                u_.head(q) -= step * r;
                u_[q] += step;
                if (step == full) {
                    if (!add(dv)) return std::nullopt;
                    active_.push_back(p);
                    break;
                }
                remove(drop);
            }
        }
        State state;
        state.nu = nu;
        state.x = x_;
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const double a = u_[static_cast<Eigen::Index>(k)];
            if (active_[k] >= atom_count() || !(a > 0.0)) continue;
            state.alpha.emplace_back(active_[k], a);
            state.total += a;
        }
        return state;
    }

    bool add(Vector dv) {
        const Eigen::Index n = d_;
        const auto q = static_cast<Eigen::Index>(active_.size());
        for (Eigen::Index j = n - 1; j > q; --j) {
            double cc = dv[j - 1];
            double ss = dv[j];
            const double h = std::hypot(cc, ss);
            if (h == 0.0) continue;
            dv[j] = 0.0;
            ss /= h;
            cc /= h;
            if (cc < 0.0) {
                cc = -cc;
                ss = -ss;
                dv[j - 1] = -h;
            } else {
                dv[j - 1] = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Eigen::Index k = 0; k < n; ++k) {
                const double t1 = j_(k, j - 1);
                const double t2 = j_(k, j);
                j_(k, j - 1) = t1 * cc + t2 * ss;
                j_(k, j) = xny * (t1 + j_(k, j - 1)) - t2;
            }
        }
        for (Eigen::Index i = 0; i <= q; ++i) r_(i, q) = dv[i];
        if (std::abs(dv[q]) <= 1e-14 * r_norm_) return false;
        r_norm_ = std::max(r_norm_, std::abs(dv[q]));
        return true;
    }

    void remove(Eigen::Index pos) {
        const Eigen::Index n = d_;
        const auto q = static_cast<Eigen::Index>(active_.size());
        for (Eigen::Index i = pos; i + 1 < q; ++i) {
            active_[static_cast<std::size_t>(i)] = active_[static_cast<std::size_t>(i + 1)];
            u_[i] = u_[i + 1];
            r_.col(i) = r_.col(i + 1);
        }
        u_[q - 1] = u_[q];
        u_[q] = 0.0;
        r_.col(q - 1).setZero();
        active_.pop_back();
        const Eigen::Index nq = q - 1;
        for (Eigen::Index j = pos; j < nq; ++j) {
            double cc = r_(j, j);
            double ss = r_(j + 1, j);
            const double h = std::hypot(cc, ss);
            if (h == 0.0) continue;
            cc /= h;
            ss /= h;
            r_(j + 1, j) = 0.0;
            if (cc < 0.0) {
                r_(j, j) = -h;
                cc = -cc;
                ss = -ss;
            } else {
                r_(j, j) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Eigen::Index k = j + 1; k < nq; ++k) {
                const double t1 = r_(j, k);
                const double t2 = r_(j + 1, k);
                r_(j, k) = t1 * cc + t2 * ss;
                r_(j + 1, k) = xny * (t1 + r_(j, k)) - t2;
            }
            for (Eigen::Index k = 0; k < n; ++k) {
                const double t1 = j_(k, j);
                const double t2 = j_(k, j + 1);
                j_(k, j) = t1 * cc + t2 * ss;
                j_(k, j + 1) = xny * (j_(k, j) + t1) - t2;
            }
        }
    }

    std::optional<MomentSolution> finish(const State& state) const {
        MomentSolution sol;
        sol.eta = Vector::Zero(d_);
        sol.alpha = state.alpha;
        if (simplex_ && state.total > 1.0) {
            for (auto& entry : sol.alpha) entry.second /= state.total;
        }
        for (const auto& [i, a] : sol.alpha) {
            sol.cost += a * atoms_[i].value;
            for (int j : atoms_.members(i)) sol.eta[j] += a;
        }
        std::sort(sol.alpha.begin(), sol.alpha.end());
        double value = t_ * sol.cost;
        for (int j = 0; j < d_; ++j) {
            const double w = std::isfinite(c_[j]) ? std::min(b_[j], sol.eta[j] * inv_c_[j]) : 0.0;
            if (std::abs(b_[j] - state.x[j] - w) > 1e-7 * (1.0 + b_[j])) return std::nullopt;
            value += 0.5 * (b_[j] - w) * (b_[j] - w);
        }
        sol.value = value;
        sol.gap = 0.0;
        sol.converged = true;
        return sol;
    }

    const AtomCollection& atoms_;
    const Vector& b_;
    const Vector& c_;
    double t_;
    int d_;
    bool simplex_;
    Vector inv_c_;
    double tol_ = 0.0;
    double nu_ = 0.0;
    int max_steps_ = 0;
    Vector x_;
    Matrix j_;
    Matrix r_;
    Vector u_;
    std::vector<int> active_;
    double r_norm_ = 1.0;
};

} // namespace

MomentSolution solve_clipped_prox(const AtomCollection& atoms, MomentMode mode, double radius,
                                  const ClippedQuadratic& model, double t,
                                  const std::vector<std::pair<int, double>>& init,
                                  const numerics::FrankWolfeOptions& options) {
    DualQp qp(atoms, mode, model, t);
    if (auto sol = qp.solve(50 * (atoms.ground_size() + 2))) return *sol;
    return solve_moment(atoms, mode, radius, model, t, init, options);
}

} // namespace combipen::detail
