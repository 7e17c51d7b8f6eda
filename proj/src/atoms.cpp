#include "combipen/atoms.hpp"

#include <algorithm>
#include <set>

namespace combipen {

AtomCollection::AtomCollection(int d, std::vector<Atom> atoms, Tri monotone)
    : d_(d), atoms_(std::move(atoms)), covers_(d), monotone_(monotone) {
    require(d >= 1, "AtomCollection: ground set must be nonempty");
    std::set<SupportSet> seen;
    for (const auto& a : atoms_) {
        require(a.set.ground_size() == d, "AtomCollection: atom on a foreign ground set");
        require(!a.set.empty(), "AtomCollection: empty atom");
        require(std::isfinite(a.value) && a.value > 0.0, "AtomCollection: atom values must be finite and positive");
        require(seen.insert(a.set).second, "AtomCollection: duplicate atom " + a.set.to_string());
    }
    finalize();
}

void AtomCollection::finalize() {
    members_.clear();
    members_.reserve(atoms_.size());
    cheapest_.assign(static_cast<std::size_t>(d_), kInf);
    cheapest_atom_.assign(static_cast<std::size_t>(d_), -1);
    covers_ = SupportSet(d_);
    std::vector<double> singleton(static_cast<std::size_t>(d_), kInf);
    for (int i = 0; i < size(); ++i) {
        const auto& a = atoms_[static_cast<std::size_t>(i)];
        auto m = a.set.members();
        for (int& j : m) {
            --j;
            covers_.insert(j + 1);
            if (a.value < cheapest_[static_cast<std::size_t>(j)]) {
                cheapest_[static_cast<std::size_t>(j)] = a.value;
                cheapest_atom_[static_cast<std::size_t>(j)] = i;
            }
        }
        if (m.size() == 1) singleton[static_cast<std::size_t>(m[0])] = a.value;
        members_.push_back(std::move(m));
    }

    l1_weights_.reset();
    bool reducible = std::all_of(singleton.begin(), singleton.end(), [](double v) { return std::isfinite(v); });
    for (int i = 0; reducible && i < size(); ++i) {
        double sum = 0.0;
        for (int j : members_[static_cast<std::size_t>(i)]) sum += singleton[static_cast<std::size_t>(j)];
        reducible = atoms_[static_cast<std::size_t>(i)].value >= sum * (1.0 - 1e-12);
    }
    if (reducible) l1_weights_ = std::move(singleton);
}

int AtomCollection::interval_index(int lo, int hi) const {
    require(interval_family_, "interval_index: not an interval family");
    require(1 <= lo && lo <= hi && hi <= d_, "interval_index: invalid interval");
    const int l = lo - 1;
    // Intervals starting before l contribute d, d-1, ..., d-l+1 entries.
    return l * d_ - l * (l - 1) / 2 + (hi - lo);
}

AtomCollection atoms_all_subsets(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 16, "atoms_all_subsets");
    const auto values = tabulate(f);
    std::vector<std::pair<SupportSet, double>> finite;
    for (std::uint64_t m = 1; m < values.size(); ++m)
        if (std::isfinite(values[m])) finite.emplace_back(SupportSet::from_mask(d, m), values[m]);
    std::sort(finite.begin(), finite.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Atom> atoms;
    atoms.reserve(finite.size());
    for (auto& [s, v] : finite) atoms.push_back({std::move(s), v});
    return AtomCollection(d, std::move(atoms), f.monotone());
}

AtomCollection atoms_intervals(const SetFunction& f) {
    const int d = f.ground_size();
    require(static_cast<long long>(d) * (d + 1) / 2 <= 5'000'000, "atoms_intervals: too many intervals");
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(d) * (d + 1) / 2);
    for (int lo = 1; lo <= d; ++lo) {
        for (int hi = lo; hi <= d; ++hi) {
            auto s = SupportSet::interval(d, lo, hi);
            const double v = f(s);
            require(std::isfinite(v), "atoms_intervals: F is infinite on interval " + s.to_string());
            atoms.push_back({std::move(s), v});
        }
    }
    AtomCollection out(d, std::move(atoms), f.monotone());
    out.interval_family_ = true;

    const double b = d >= 2 ? out[out.interval_index(1, 2)].value - out[0].value : 0.0;
    const double a = out[0].value - b;
    bool affine = true;
    for (int lo = 1; lo <= d && affine; ++lo)
        for (int hi = lo; hi <= d && affine; ++hi)
            affine = std::abs(out[out.interval_index(lo, hi)].value - (a + b * (hi - lo + 1))) <=
                     1e-12 * std::max(1.0, std::abs(a) + std::abs(b) * d);
    if (affine) out.affine_ = std::make_pair(a, b);
    return out;
}

AtomCollection atoms_groups(const GroupFamily& family, const SetFunction& f) {
    const int d = f.ground_size();
    family.validate(d);
    std::vector<Atom> atoms;
    for (const auto& g : family.groups) {
        const double v = f(g);
        require(std::isfinite(v), "atoms_groups: F is infinite on group " + g.to_string());
        atoms.push_back({g, v});
    }
    return AtomCollection(d, std::move(atoms), f.monotone());
}

AtomCollection make_atoms(std::string_view family, const SetFunction& f) {
    if (family == "all") return atoms_all_subsets(f);
    if (family == "intervals") return atoms_intervals(f);
    if (family == "groups") {
        require(f.groups().has_value(), "atoms 'groups' requires a group-based set function");
        return atoms_groups(*f.groups(), f);
    }
    throw InvalidArgument("unknown atom family '" + std::string(family) + "' (all|intervals|groups)");
}

} // namespace combipen
