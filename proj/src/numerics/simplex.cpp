#include "combipen/numerics/simplex.hpp"

#include <algorithm>

namespace combipen::numerics {

void LinearProgram::validate() const {
    const auto m = a.rows();
    const auto n = a.cols();
    require(costs.size() == n, "LinearProgram: cost length differs from column count");
    require(b.size() == m, "LinearProgram: rhs length differs from row count");
    require(static_cast<Eigen::Index>(senses.size()) == m, "LinearProgram: one sense per row required");
    require(free.empty() || static_cast<Eigen::Index>(free.size()) == n,
            "LinearProgram: free flags must cover every variable");
    require(costs.allFinite() && a.allFinite() && b.allFinite(), "LinearProgram: data must be finite");
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr int kMaxPivots = 200000;

class Tableau {
public:
    Tableau(Matrix t, std::vector<int> basis, int artificial_begin)
        : t_(std::move(t)), basis_(std::move(basis)), artificial_begin_(artificial_begin) {}

    int rows() const { return static_cast<int>(t_.rows()) - 1; }
    int cols() const { return static_cast<int>(t_.cols()) - 1; }
    const std::vector<int>& basis() const { return basis_; }
    double entry(int r, int c) const { return t_(r, c); }
    double objective() const { return -t_(rows(), cols()); }
    int pivots() const { return pivots_; }

    // Loads c as the objective row and prices out the basis.
    void set_costs(const Vector& c) {
        const int m = rows();
        t_.row(m).setZero();
        t_.row(m).head(cols()) = c.transpose();
        for (int r = 0; r < m; ++r) {
            const double cb = t_(m, basis_[r]);
            if (cb != 0.0) t_.row(m) -= cb * t_.row(r);
        }
    }

    // Returns false when unbounded.
    bool optimize(bool allow_artificial) {
        const int m = rows();
        const int limit = allow_artificial ? cols() : artificial_begin_;
        for (;;) {
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (t_(m, j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = kInf;
            for (int r = 0; r < m; ++r) {
                const double coef = t_(r, enter);
                if (coef <= kPivotTol) continue;
                const double ratio = t_(r, cols()) / coef;
                const bool tie = leave >= 0 && std::abs(ratio - best) <= 1e-12;
                if (leave < 0 || ratio < best - 1e-12 || (tie && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = tie ? std::min(best, ratio) : ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void pivot(int r, int c) {
        if (++pivots_ > kMaxPivots) throw ConvergenceError("simplex: pivot limit exceeded");
        t_.row(r) /= t_(r, c);
        for (int i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = c;
    }

private:
    Matrix t_;
    std::vector<int> basis_;
    int artificial_begin_;
    int pivots_ = 0;
};

} // namespace

LpResult simplex_solve(const LinearProgram& lp) {
    lp.validate();
    const int m = static_cast<int>(lp.a.rows());
    const int n = static_cast<int>(lp.a.cols());
    const auto is_free = [&](int j) { return !lp.free.empty() && lp.free[j]; };

    // Structural columns: x_j (and -x_j for free variables).
    std::vector<int> pos(n), neg(n, -1);
    int cols = 0;
    for (int j = 0; j < n; ++j) {
        pos[j] = cols++;
        if (is_free(j)) neg[j] = cols++;
    }

    std::vector<double> flip(m, 1.0);
    std::vector<Sense> senses(lp.senses);
    for (int r = 0; r < m; ++r) {
        if (lp.b[r] < 0) {
            flip[r] = -1.0;
            if (senses[r] == Sense::less_equal) senses[r] = Sense::greater_equal;
            else if (senses[r] == Sense::greater_equal) senses[r] = Sense::less_equal;
        }
    }
    std::vector<int> slack(m, -1), artificial(m, -1);
    for (int r = 0; r < m; ++r)
        if (senses[r] != Sense::equal) slack[r] = cols++;
    const int artificial_begin = cols;
    for (int r = 0; r < m; ++r)
        if (senses[r] != Sense::less_equal) artificial[r] = cols++;

    Matrix standard = Matrix::Zero(m, cols);
    Vector rhs(m);
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n; ++j) {
            const double v = flip[r] * lp.a(r, j);
            standard(r, pos[j]) = v;
            if (neg[j] >= 0) standard(r, neg[j]) = -v;
        }
        if (slack[r] >= 0) standard(r, slack[r]) = senses[r] == Sense::less_equal ? 1.0 : -1.0;
        if (artificial[r] >= 0) standard(r, artificial[r]) = 1.0;
        rhs[r] = flip[r] * lp.b[r];
    }

    Matrix t = Matrix::Zero(m + 1, cols + 1);
    t.topLeftCorner(m, cols) = standard;
    t.col(cols).head(m) = rhs;
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) basis[r] = artificial[r] >= 0 ? artificial[r] : slack[r];
    Tableau tab(std::move(t), std::move(basis), artificial_begin);

    LpResult result;
    const double scale = 1.0 + (m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);
    if (artificial_begin < cols) {
        Vector phase1 = Vector::Zero(cols);
        phase1.tail(cols - artificial_begin).setOnes();
        tab.set_costs(phase1);
        tab.optimize(true);
        if (tab.objective() > 1e-9 * scale) {
            result.status = LpStatus::infeasible;
            result.pivots = tab.pivots();
            return result;
        }
        for (int r = 0; r < m; ++r) {
            if (tab.basis()[r] < artificial_begin) continue;
            for (int j = 0; j < artificial_begin; ++j) {
                if (std::abs(tab.entry(r, j)) > 1e-9) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
    }

    Vector phase2 = Vector::Zero(cols);
    for (int j = 0; j < n; ++j) {
        phase2[pos[j]] = lp.costs[j];
        if (neg[j] >= 0) phase2[neg[j]] = -lp.costs[j];
    }
    tab.set_costs(phase2);
    if (!tab.optimize(false)) {
        result.status = LpStatus::unbounded;
        result.value = -kInf;
        result.pivots = tab.pivots();
        return result;
    }

    // Recompute the basic solution and duals from the final basis. Rows whose
    // basic variable is still artificial are redundant and dropped.
    std::vector<int> rows_kept, basic_cols;
    for (int r = 0; r < m; ++r) {
        if (tab.basis()[r] >= artificial_begin) continue;
        rows_kept.push_back(r);
        basic_cols.push_back(tab.basis()[r]);
    }
    const int k = static_cast<int>(rows_kept.size());
    Matrix bmat(k, k);
    Vector brhs(k), cb(k);
    for (int i = 0; i < k; ++i) {
        brhs[i] = rhs[rows_kept[i]];
        cb[i] = phase2[basic_cols[i]];
        for (int l = 0; l < k; ++l) bmat(i, l) = standard(rows_kept[i], basic_cols[l]);
    }
    Vector xb = Vector::Zero(k), yk = Vector::Zero(k);
    if (k > 0) {
        const Eigen::FullPivLU<Matrix> lu(bmat);
        xb = lu.solve(brhs);
        yk = lu.transpose().solve(cb);
    }
    Vector xs = Vector::Zero(cols);
    for (int i = 0; i < k; ++i) xs[basic_cols[i]] = std::max(0.0, xb[i]);

    result.status = LpStatus::optimal;
    result.x = Vector::Zero(n);
    for (int j = 0; j < n; ++j) result.x[j] = xs[pos[j]] - (neg[j] >= 0 ? xs[neg[j]] : 0.0);
    result.duals = Vector::Zero(m);
    for (int i = 0; i < k; ++i) result.duals[rows_kept[i]] = flip[rows_kept[i]] * yk[i];
    result.value = lp.costs.dot(result.x);
    result.pivots = tab.pivots();
    return result;
}

} // namespace combipen::numerics
