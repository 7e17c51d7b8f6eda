#pragma once

#include "combipen/set_function.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace combipen {

// A -> min{F(S) : A ⊆ S}. Monotone built-ins are returned unchanged; other
// functions are tabulated (d <= 20).
SetFunction monotonization(const SetFunction& f);

// Exhaustive checks over all (A ⊆ B, i ∉ B), d <= 16. Triples where F(A) or
// F(B) is infinite are vacuous (the gains are undefined there).
bool is_monotone(const SetFunction& f);
bool is_submodular(const SetFunction& f);

struct RhoSubmodularity {
    double value = 1.0;
    // Exact ratio numerator/denominator when F is integer-valued.
    std::optional<std::pair<long long, long long>> exact;
};

// Largest rho in (0, 1] with rho [F(B+i) - F(B)] <= F(A+i) - F(A) for all
// A ⊆ B, i ∉ B, or nullopt when some positive gain at B meets a zero gain at a
// subset A. Requires F finite-valued and monotone, d <= 14.
std::optional<RhoSubmodularity> rho_submodularity(const SetFunction& f);

// gamma_{S,L} = sum_{i in S} [F(L+i) - F(L)] / [F(L ∪ S) - F(L)].
double weak_submodularity_ratio(const SetFunction& f, const SupportSet& s, const SupportSet& l);
// Minimum of gamma over every valid (S, L) pair, d <= 10. Returns +inf when
// no pair has a positive denominator.
double min_weak_submodularity_ratio(const SetFunction& f);

struct StabilityReport {
    SupportSet set;
    bool weakly_stable = false;
    bool strongly_stable = false;
    // (A, i) with A ⊆ J, i ∉ J and F(A + i) <= F(A).
    std::optional<std::pair<SupportSet, int>> witness;
    // Some A ⊆ J has F(A) = +inf although F(J) is finite.
    bool mixed_feasibility = false;
};

enum class StabilityMode { weak, strong };

// Strict growth test for a single J; needs 2^|J| (d - |J|) evaluations, |J| <= 24.
StabilityReport discrete_stability(const SetFunction& f, const SupportSet& j);

// Every stable set in canonical (size, lexicographic) order, d <= 14.
std::vector<SupportSet> enumerate_stable_sets(const SetFunction& f, StabilityMode mode);

} // namespace combipen
