#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace combipen {

// A subset of the ground set V = {1, ..., d}. Elements are 1-indexed.
class SupportSet {
public:
    SupportSet() = default;
    explicit SupportSet(int d);
    SupportSet(int d, std::initializer_list<int> members);
    SupportSet(int d, std::span<const int> members);

    static SupportSet from_mask(int d, std::uint64_t mask);
    static SupportSet full(int d);
    // {lo, lo+1, ..., hi}; empty when hi < lo.
    static SupportSet interval(int d, int lo, int hi);

    int ground_size() const { return d_; }
    int size() const;
    bool empty() const;
    bool contains(int i) const;

    void insert(int i);
    void erase(int i);
    SupportSet with(int i) const;
    SupportSet without(int i) const;

    std::vector<int> members() const;
    // Bit k encodes element k + 1. Requires d <= 64.
    std::uint64_t mask() const;

    int min() const;
    int max() const;
    bool is_interval() const;

    SupportSet complement() const;
    SupportSet unite(const SupportSet& other) const;
    SupportSet intersect(const SupportSet& other) const;
    SupportSet minus(const SupportSet& other) const;
    bool is_subset_of(const SupportSet& other) const;
    bool disjoint_from(const SupportSet& other) const;

    std::string to_string() const;

    friend bool operator==(const SupportSet& a, const SupportSet& b) = default;
    // Canonical order: by cardinality, then lexicographic on sorted members.
    friend std::strong_ordering operator<=>(const SupportSet& a, const SupportSet& b);

private:
    void check_element(int i) const;
    void check_same_ground(const SupportSet& other) const;

    int d_ = 0;
    std::vector<std::uint64_t> words_;
};

// Symmetric difference size |A Δ B|.
int hamming(const SupportSet& a, const SupportSet& b);

} // namespace combipen
