#pragma once

#include "combipen/common.hpp"
#include "combipen/set_function.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace combipen {

struct Atom {
    SupportSet set;
    double value = 0.0;
};

// Finite family of sets with finite positive values over which covers are
// formed. Interval families keep a (lo, hi) layout for O(d^2) scans.
class AtomCollection {
public:
    AtomCollection(int d, std::vector<Atom> atoms, Tri monotone = Tri::unknown);

    int ground_size() const { return d_; }
    int size() const { return static_cast<int>(atoms_.size()); }
    const Atom& operator[](int i) const { return atoms_[static_cast<std::size_t>(i)]; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<int>& members(int i) const { return members_[static_cast<std::size_t>(i)]; }
    const SupportSet& covers() const { return covers_; }
    bool covers_all() const { return covers_.size() == d_; }
    // Monotonicity of the function the atoms were drawn from.
    Tri monotone() const { return monotone_; }
    bool is_interval_family() const { return interval_family_; }
    // F(I) = a + b |I| on every interval (interval families only).
    std::optional<std::pair<double, double>> interval_affine() const { return affine_; }
    // Per-coordinate weights f_j such that Omega_p reduces to a weighted l1
    // norm sum_j f_j^{1/q} |u_j|: every singleton is an atom and every atom
    // satisfies F(S) >= sum_{j in S} F({j}).
    const std::optional<std::vector<double>>& l1_weights() const { return l1_weights_; }
    // Smallest atom value among atoms containing element j (1-based), +inf if none.
    double cheapest_cover(int j) const { return cheapest_[static_cast<std::size_t>(j - 1)]; }
    int cheapest_atom(int j) const { return cheapest_atom_[static_cast<std::size_t>(j - 1)]; }

    // Calls visit(atom_index, sum_{j in S} g_j) for every atom.
    template <class Visit>
    void for_each_sum(const Vector& g, Visit&& visit) const {
        if (interval_family_) {
            int idx = 0;
            for (int lo = 0; lo < d_; ++lo) {
                double acc = 0.0;
                for (int hi = lo; hi < d_; ++hi) {
                    acc += g[hi];
                    visit(idx++, acc);
                }
            }
            return;
        }
        for (int i = 0; i < size(); ++i) {
            double acc = 0.0;
            for (int j : members_[static_cast<std::size_t>(i)]) acc += g[j];
            visit(i, acc);
        }
    }

    // Index of interval [lo, hi] (1-based, inclusive) in an interval family.
    int interval_index(int lo, int hi) const;

private:
    void finalize();

    int d_;
    std::vector<Atom> atoms_;
    std::vector<std::vector<int>> members_;  // 0-based
    SupportSet covers_;
    Tri monotone_;
    bool interval_family_ = false;
    std::optional<std::pair<double, double>> affine_;
    std::optional<std::vector<double>> l1_weights_;
    std::vector<double> cheapest_;
    std::vector<int> cheapest_atom_;

    friend AtomCollection atoms_intervals(const SetFunction& f);
};

// Every nonempty set with finite value. Requires d <= 16.
AtomCollection atoms_all_subsets(const SetFunction& f);
// All d(d+1)/2 intervals; F must be finite on each.
AtomCollection atoms_intervals(const SetFunction& f);
// The groups of a family, valued by F.
AtomCollection atoms_groups(const GroupFamily& family, const SetFunction& f);

// Parses "all" | "intervals" | "groups" (the latter needs F to carry groups).
AtomCollection make_atoms(std::string_view family, const SetFunction& f);

} // namespace combipen
