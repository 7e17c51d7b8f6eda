#pragma once

#include "combipen/support_set.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace combipen {

// Three-valued structural flag.
enum class Tri { unknown, yes, no };

struct GroupFamily {
    std::vector<SupportSet> groups;
    std::vector<double> weights;

    // Unit weights.
    static GroupFamily uniform(std::vector<SupportSet> groups);
    void validate(int d) const;
};

enum class SetFunctionKind {
    cardinality,
    range,
    modified_range,
    overlap_count,
    dispersive,
    down_monotone,
    table,
};

// A positive extended-real set function F on 2^V with F(empty) = 0.
// Immutable after construction; copies share the evaluator.
class SetFunction {
public:
    using Evaluator = std::function<double(const SupportSet&)>;

    struct Traits {
        SetFunctionKind kind = SetFunctionKind::table;
        std::string name;
        Tri monotone = Tri::unknown;
        Tri submodular = Tri::unknown;
        bool integer_valued = false;
        std::optional<GroupFamily> groups;
    };

    SetFunction(int d, Evaluator evaluator, Traits traits);

    int ground_size() const { return d_; }
    double operator()(const SupportSet& s) const { return value(s); }
    double value(const SupportSet& s) const;
    // Bit k of mask encodes element k + 1. Requires d <= 64.
    double value_mask(std::uint64_t mask) const;

    SetFunctionKind kind() const { return traits_->kind; }
    const std::string& name() const { return traits_->name; }
    Tri monotone() const { return traits_->monotone; }
    Tri submodular() const { return traits_->submodular; }
    bool integer_valued() const { return traits_->integer_valued; }
    const std::optional<GroupFamily>& groups() const { return traits_->groups; }
    const std::vector<double>* table() const { return table_.get(); }

private:
    friend SetFunction make_table(int d, std::vector<double> values, std::string name);

    int d_;
    Evaluator evaluator_;
    std::shared_ptr<const Traits> traits_;
    std::shared_ptr<const std::vector<double>> table_;
};

SetFunction make_cardinality(int d);
// range(A) = max(A) - min(A) + 1.
SetFunction make_range(int d);
// d - 1 + range(A) for nonempty A.
SetFunction make_modified_range(int d);
// Sum of d_G over groups G hit by A.
SetFunction make_overlap_count(int d, GroupFamily family);
// |A| when A hits every group at most once, +inf otherwise.
SetFunction make_dispersive(int d, GroupFamily family);
// |A| + indicator of membership in a down-monotone family M.
SetFunction make_down_monotone(int d, std::function<bool(const SupportSet&)> member,
                               std::string name = "down_monotone");
// Explicit table indexed by bitmask (bit k <-> element k + 1), length 2^d.
SetFunction make_table(int d, std::vector<double> values, std::string name = "table");

// Weakly submodular but not rho-submodular function on V = {1,2,3}:
// F({i}) = 1, F({1,2}) = 1, F({1,3}) = F({2,3}) = 2, F(V) = 3.
SetFunction make_weak_counterexample();

// All 2^d values indexed by bitmask. Requires d <= 24.
std::vector<double> tabulate(const SetFunction& f);

// Text format: one "bitmask value" pair per line, "inf" allowed, '#' starts a
// comment. Every subset must appear exactly once.
SetFunction read_table(std::istream& in, int d, std::string name = "table");
SetFunction load_table(const std::string& path, int d);
void write_table(std::ostream& out, const SetFunction& f);

// Parses a CLI function spec:
//   cardinality | range | modified_range | counterexample
//   overlap:1,2/2,3@0.5       (groups separated by '/', optional @weight)
//   dispersive:1,2/3,4
//   table:<path>
SetFunction parse_set_function(std::string_view spec, int d);

// Parses "1,2/3,4@2" into a family; weights default to 1.
GroupFamily parse_group_family(std::string_view text, int d);

} // namespace combipen
