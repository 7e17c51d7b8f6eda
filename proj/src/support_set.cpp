#include "combipen/support_set.hpp"

#include "combipen/common.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace combipen {

namespace {
constexpr int kWordBits = 64;
int word_count(int d) { return (d + kWordBits - 1) / kWordBits; }
} // namespace

SupportSet::SupportSet(int d) : d_(d), words_(word_count(d), 0) {
    require(d >= 1, "ground set size must be positive");
}

SupportSet::SupportSet(int d, std::initializer_list<int> members)
    : SupportSet(d, std::span<const int>(members.begin(), members.size())) {}

SupportSet::SupportSet(int d, std::span<const int> members) : SupportSet(d) {
    for (int i : members) insert(i);
}

SupportSet SupportSet::from_mask(int d, std::uint64_t mask) {
    require(d <= 64, "from_mask requires d <= 64");
    SupportSet s(d);
    if (d < 64) require((mask >> d) == 0, "mask has bits beyond the ground set");
    s.words_[0] = mask;
    return s;
}

SupportSet SupportSet::full(int d) {
    SupportSet s(d);
    for (int i = 1; i <= d; ++i) s.insert(i);
    return s;
}

SupportSet SupportSet::interval(int d, int lo, int hi) {
    SupportSet s(d);
    for (int i = lo; i <= hi; ++i) s.insert(i);
    return s;
}

void SupportSet::check_element(int i) const {
    if (i < 1 || i > d_)
        throw InvalidArgument("element " + std::to_string(i) + " outside ground set {1.." +
                              std::to_string(d_) + "}");
}

void SupportSet::check_same_ground(const SupportSet& other) const {
    require(d_ == other.d_, "support sets live on different ground sets");
}

int SupportSet::size() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

bool SupportSet::empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

bool SupportSet::contains(int i) const {
    if (i < 1 || i > d_) return false;
    const int k = i - 1;
    return (words_[k / kWordBits] >> (k % kWordBits)) & 1U;
}

void SupportSet::insert(int i) {
    check_element(i);
    const int k = i - 1;
    words_[k / kWordBits] |= std::uint64_t{1} << (k % kWordBits);
}

void SupportSet::erase(int i) {
    check_element(i);
    const int k = i - 1;
    words_[k / kWordBits] &= ~(std::uint64_t{1} << (k % kWordBits));
}

SupportSet SupportSet::with(int i) const {
    SupportSet s = *this;
    s.insert(i);
    return s;
}

SupportSet SupportSet::without(int i) const {
    SupportSet s = *this;
    s.erase(i);
    return s;
}

std::vector<int> SupportSet::members() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto bits = words_[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(static_cast<int>(w) * kWordBits + b + 1);
            bits &= bits - 1;
        }
    }
    return out;
}

std::uint64_t SupportSet::mask() const {
    require(d_ <= 64, "mask() requires d <= 64");
    return words_.empty() ? 0 : words_[0];
}

int SupportSet::min() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w]) return static_cast<int>(w) * kWordBits + std::countr_zero(words_[w]) + 1;
    throw InvalidArgument("min() of an empty set");
}

int SupportSet::max() const {
    for (std::size_t w = words_.size(); w-- > 0;)
        if (words_[w])
            return static_cast<int>(w) * kWordBits + (kWordBits - 1 - std::countl_zero(words_[w])) + 1;
    throw InvalidArgument("max() of an empty set");
}

bool SupportSet::is_interval() const {
    if (empty()) return true;
    return max() - min() + 1 == size();
}

SupportSet SupportSet::complement() const {
    SupportSet s(d_);
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] = ~words_[w];
    const int tail = d_ % kWordBits;
    if (tail) s.words_.back() &= (std::uint64_t{1} << tail) - 1;
    return s;
}

SupportSet SupportSet::unite(const SupportSet& other) const {
    check_same_ground(other);
    SupportSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] |= other.words_[w];
    return s;
}

SupportSet SupportSet::intersect(const SupportSet& other) const {
    check_same_ground(other);
    SupportSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] &= other.words_[w];
    return s;
}

SupportSet SupportSet::minus(const SupportSet& other) const {
    check_same_ground(other);
    SupportSet s = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] &= ~other.words_[w];
    return s;
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
    check_same_ground(other);
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] & ~other.words_[w]) return false;
    return true;
}

bool SupportSet::disjoint_from(const SupportSet& other) const {
    check_same_ground(other);
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] & other.words_[w]) return false;
    return true;
}

std::string SupportSet::to_string() const {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (int i : members()) {
        if (!first) out << ',';
        out << i;
        first = false;
    }
    out << '}';
    return out.str();
}

std::strong_ordering operator<=>(const SupportSet& a, const SupportSet& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    const auto ma = a.members();
    const auto mb = b.members();
    if (auto c = std::lexicographical_compare_three_way(ma.begin(), ma.end(), mb.begin(), mb.end());
        c != 0)
        return c;
    return a.ground_size() <=> b.ground_size();
}

int hamming(const SupportSet& a, const SupportSet& b) {
    return a.minus(b).size() + b.minus(a).size();
}

} // namespace combipen
