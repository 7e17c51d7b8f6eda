#include "combipen/structure.hpp"

#include "combipen/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace combipen {

namespace {

constexpr double kFloatTol = 1e-12;

// Strict a > b under extended-real comparison; exact for integer-valued
// functions, 1e-12 slack otherwise.
bool strictly_greater(double a, double b, bool exact) {
    if (std::isinf(b)) return false;
    if (std::isinf(a)) return true;
    return exact ? a > b : a > b + kFloatTol;
}

constexpr std::uint64_t bit(int k) { return std::uint64_t{1} << k; }

// sub[m] = min over submasks A of m of values[A], restricted to masks that do
// not contain the excluded bit.
void submask_min(std::vector<double>& values, int d, int excluded) {
    const std::uint64_t n = bit(d);
    for (int b = 0; b < d; ++b) {
        if (b == excluded) continue;
        for (std::uint64_t m = 0; m < n; ++m)
            if ((m & bit(b)) && !(m & bit(excluded)))
                values[m] = std::min(values[m], values[m ^ bit(b)]);
    }
}

// Gain of adding element k+1 to A; +inf when F(A + k) is infinite, nan when
// F(A) itself is infinite (undefined gain).
double gain(const std::vector<double>& v, std::uint64_t m, int k) {
    if (std::isinf(v[m])) return std::nan("");
    return v[m | bit(k)] - v[m];
}

} // namespace

SetFunction monotonization(const SetFunction& f) {
    if (f.monotone() == Tri::yes) return f;
    const int d = f.ground_size();
    require_ground_size(d, 20, "monotonization");
    auto values = tabulate(f);
    const std::uint64_t n = bit(d);
    for (int b = 0; b < d; ++b)
        for (std::uint64_t m = 0; m < n; ++m)
            if (!(m & bit(b))) values[m] = std::min(values[m], values[m | bit(b)]);
    return make_table(d, std::move(values), "monotonization(" + f.name() + ")");
}

bool is_monotone(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 16, "is_monotone");
    const auto v = tabulate(f);
    for (std::uint64_t m = 0; m < v.size(); ++m)
        for (int k = 0; k < d; ++k)
            if (!(m & bit(k)) && v[m] > v[m | bit(k)]) return false;
    return true;
}

bool is_submodular(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 16, "is_submodular");
    const auto v = tabulate(f);
    const bool exact = f.integer_valued();
    const std::uint64_t n = bit(d);
    std::vector<double> sub(n);
    for (int k = 0; k < d; ++k) {
        for (std::uint64_t m = 0; m < n; ++m) {
            if (m & bit(k)) {
                sub[m] = kInf;
                continue;
            }
            const double g = gain(v, m, k);
            sub[m] = std::isnan(g) ? kInf : g;
        }
        submask_min(sub, d, k);
        for (std::uint64_t m = 0; m < n; ++m) {
            if (m & bit(k)) continue;
            const double g = gain(v, m, k);
            if (std::isnan(g)) continue;
            if (std::isinf(g)) {
                if (!std::isinf(sub[m])) return false;
                continue;
            }
            if (exact ? g > sub[m] : g > sub[m] + kFloatTol) return false;
        }
    }
    return true;
}

std::optional<RhoSubmodularity> rho_submodularity(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 14, "rho_submodularity");
    const auto v = tabulate(f);
    for (double x : v) require(std::isfinite(x), "rho_submodularity requires a finite-valued function");
    require(is_monotone(f), "rho_submodularity requires a monotone function");

    const bool exact = f.integer_valued();
    const std::uint64_t n = bit(d);
    std::vector<double> sub(n);
    double best = 1.0;
    long long best_num = 1, best_den = 1;
    bool any_positive = false;
    for (int k = 0; k < d; ++k) {
        for (std::uint64_t m = 0; m < n; ++m) sub[m] = (m & bit(k)) ? kInf : gain(v, m, k);
        submask_min(sub, d, k);
        for (std::uint64_t m = 0; m < n; ++m) {
            if (m & bit(k)) continue;
            const double g = gain(v, m, k);
            const bool positive = exact ? g > 0 : g > kFloatTol;
            if (!positive) continue;
            any_positive = true;
            const double lo = sub[m];
            if (exact ? lo <= 0 : lo <= kFloatTol) return std::nullopt;
            if (exact) {
                const auto num = std::llround(lo);
                const auto den = std::llround(g);
                if (num * best_den < best_num * den) {
                    best_num = num;
                    best_den = den;
                }
            } else {
                best = std::min(best, lo / g);
            }
        }
    }
    RhoSubmodularity out;
    if (exact) {
        const long long g = std::gcd(best_num, best_den);
        out.exact = std::make_pair(best_num / g, best_den / g);
        out.value = static_cast<double>(best_num) / static_cast<double>(best_den);
    } else {
        out.value = any_positive ? best : 1.0;
    }
    return out;
}

double weak_submodularity_ratio(const SetFunction& f, const SupportSet& s, const SupportSet& l) {
    require(s.disjoint_from(l), "weak submodularity ratio needs disjoint S and L");
    const double fl = f(l);
    const double fls = f(l.unite(s));
    require(std::isfinite(fl) && std::isfinite(fls), "weak submodularity ratio needs finite values");
    const double den = fls - fl;
    require(den > 0, "weak submodularity ratio needs F(L ∪ S) > F(L)");
    double num = 0;
    for (int i : s.members()) {
        const double fi = f(l.with(i));
        require(std::isfinite(fi), "weak submodularity ratio needs finite values");
        num += fi - fl;
    }
    return num / den;
}

double min_weak_submodularity_ratio(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 10, "min_weak_submodularity_ratio");
    const auto v = tabulate(f);
    const std::uint64_t n = bit(d);
    double best = kInf;
    for (std::uint64_t l = 0; l < n; ++l) {
        if (!std::isfinite(v[l])) continue;
        const std::uint64_t rest = (n - 1) & ~l;
        for (std::uint64_t s = rest; s; s = (s - 1) & rest) {
            const double den = v[l | s] - v[l];
            if (!std::isfinite(v[l | s]) || den <= 0) continue;
            double num = 0;
            bool finite = true;
            for (int k = 0; k < d; ++k) {
                if (!(s & bit(k))) continue;
                finite = finite && std::isfinite(v[l | bit(k)]);
                num += v[l | bit(k)] - v[l];
            }
            if (finite) best = std::min(best, num / den);
        }
    }
    return best;
}

StabilityReport discrete_stability(const SetFunction& f, const SupportSet& j) {
    const int d = f.ground_size();
    require(j.ground_size() == d, "stability set lives on a foreign ground set");
    const auto members = j.members();
    require(members.size() <= 24, "discrete_stability: |J| too large for subset enumeration");
    const bool exact = f.integer_valued();

    StabilityReport report;
    report.set = j;
    const double fj = f(j);
    if (!std::isfinite(fj)) return report;

    const auto outside = j.complement().members();
    report.weakly_stable = std::all_of(outside.begin(), outside.end(), [&](int i) {
        return strictly_greater(f(j.with(i)), fj, exact);
    });

    report.strongly_stable = true;
    const std::uint64_t subsets = std::uint64_t{1} << members.size();
    for (std::uint64_t m = 0; m < subsets; ++m) {
        SupportSet a(d);
        for (std::size_t t = 0; t < members.size(); ++t)
            if (m >> t & 1U) a.insert(members[t]);
        const double fa = f(a);
        if (std::isinf(fa)) report.mixed_feasibility = true;
        for (int i : outside) {
            if (!strictly_greater(f(a.with(i)), fa, exact)) {
                if (report.strongly_stable) report.witness = std::make_pair(a, i);
                report.strongly_stable = false;
                break;
            }
        }
    }
    return report;
}

std::vector<SupportSet> enumerate_stable_sets(const SetFunction& f, StabilityMode mode) {
    const int d = f.ground_size();
    require_ground_size(d, 14, "enumerate_stable_sets");
    const auto v = tabulate(f);
    const bool exact = f.integer_valued();
    const std::uint64_t n = bit(d);
    std::vector<char> stable(n, 0);
    for (std::uint64_t m = 0; m < n; ++m) stable[m] = std::isfinite(v[m]);

    if (mode == StabilityMode::weak) {
        for (std::uint64_t m = 0; m < n; ++m)
            for (int k = 0; k < d && stable[m]; ++k)
                if (!(m & bit(k)) && !strictly_greater(v[m | bit(k)], v[m], exact)) stable[m] = 0;
    } else {
        // pass[A] = 1 when F(A + k) > F(A); J is strongly stable iff every
        // submask A of J passes for every k outside J.
        std::vector<double> pass(n);
        for (int k = 0; k < d; ++k) {
            for (std::uint64_t m = 0; m < n; ++m)
                pass[m] = (m & bit(k)) ? 1.0 : (strictly_greater(v[m | bit(k)], v[m], exact) ? 1.0 : 0.0);
            submask_min(pass, d, k);
            for (std::uint64_t m = 0; m < n; ++m)
                if (!(m & bit(k)) && pass[m] == 0.0) stable[m] = 0;
        }
    }

    std::vector<SupportSet> out;
    for (std::uint64_t m = 0; m < n; ++m)
        if (stable[m]) out.push_back(SupportSet::from_mask(d, m));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace combipen
