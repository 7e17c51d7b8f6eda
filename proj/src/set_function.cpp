#include "combipen/set_function.hpp"

#include "combipen/common.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace combipen {

namespace {

bool is_integral(double x) { return std::isfinite(x) && std::floor(x) == x; }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& token) {
    if (token == "inf" || token == "+inf" || token == "Inf") return kInf;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + token + "'");
    }
    require(used == token.size(), "not a number: '" + token + "'");
    return v;
}

int parse_int(const std::string& token) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    require(ec == std::errc{} && ptr == token.data() + token.size(),
            "not an integer: '" + token + "'");
    return v;
}

bool monotone_by_table(int d, const std::vector<double>& v) {
    const std::uint64_t n = std::uint64_t{1} << d;
    for (std::uint64_t m = 0; m < n; ++m)
        for (int k = 0; k < d; ++k)
            if (!(m >> k & 1U) && v[m] > v[m | (std::uint64_t{1} << k)]) return false;
    return true;
}

} // namespace

GroupFamily GroupFamily::uniform(std::vector<SupportSet> groups) {
    GroupFamily g;
    g.weights.assign(groups.size(), 1.0);
    g.groups = std::move(groups);
    return g;
}

void GroupFamily::validate(int d) const {
    require(groups.size() == weights.size(), "group family needs one weight per group");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        require(groups[g].ground_size() == d, "group lives on a different ground set");
        require(!groups[g].empty(), "groups must be nonempty");
        require(std::isfinite(weights[g]) && weights[g] > 0, "group weights must be positive");
    }
}

SetFunction::SetFunction(int d, Evaluator evaluator, Traits traits)
    : d_(d), evaluator_(std::move(evaluator)),
      traits_(std::make_shared<const Traits>(std::move(traits))) {
    require(d >= 1, "ground set size must be positive");
}

double SetFunction::value(const SupportSet& s) const {
    require(s.ground_size() == d_, "set function evaluated on a foreign ground set");
    if (table_) return (*table_)[s.mask()];
    if (s.empty()) return 0.0;
    return evaluator_(s);
}

double SetFunction::value_mask(std::uint64_t mask) const {
    if (table_) return (*table_)[mask];
    if (mask == 0) return 0.0;
    return evaluator_(SupportSet::from_mask(d_, mask));
}

SetFunction make_cardinality(int d) {
    return SetFunction(d, [](const SupportSet& s) { return static_cast<double>(s.size()); },
                       {SetFunctionKind::cardinality, "cardinality", Tri::yes, Tri::yes, true, {}});
}

SetFunction make_range(int d) {
    return SetFunction(d,
                       [](const SupportSet& s) { return static_cast<double>(s.max() - s.min() + 1); },
                       {SetFunctionKind::range, "range", Tri::yes, d <= 2 ? Tri::yes : Tri::no, true, {}});
}

SetFunction make_modified_range(int d) {
    return SetFunction(
        d, [d](const SupportSet& s) { return static_cast<double>(d - 1 + s.max() - s.min() + 1); },
        {SetFunctionKind::modified_range, "modified_range", Tri::yes, Tri::yes, true, {}});
}

SetFunction make_overlap_count(int d, GroupFamily family) {
    family.validate(d);
    bool integral = true;
    for (double w : family.weights) integral = integral && is_integral(w);
    auto shared = std::make_shared<const GroupFamily>(family);
    return SetFunction(
        d,
        [shared](const SupportSet& s) {
            double total = 0;
            for (std::size_t g = 0; g < shared->groups.size(); ++g)
                if (!shared->groups[g].disjoint_from(s)) total += shared->weights[g];
            return total;
        },
        {SetFunctionKind::overlap_count, "overlap_count", Tri::yes, Tri::yes, integral, std::move(family)});
}

SetFunction make_dispersive(int d, GroupFamily family) {
    family.validate(d);
    auto shared = std::make_shared<const GroupFamily>(family);
    return SetFunction(
        d,
        [shared](const SupportSet& s) {
            for (const auto& g : shared->groups)
                if (g.intersect(s).size() > 1) return kInf;
            return static_cast<double>(s.size());
        },
        {SetFunctionKind::dispersive, "dispersive", Tri::yes, Tri::no, true, std::move(family)});
}

SetFunction make_down_monotone(int d, std::function<bool(const SupportSet&)> member, std::string name) {
    for (int i = 1; i <= d; ++i)
        require(member(SupportSet(d, {i})), "down-monotone family must contain every singleton");
    return SetFunction(
        d,
        [member = std::move(member)](const SupportSet& s) {
            return member(s) ? static_cast<double>(s.size()) : kInf;
        },
        {SetFunctionKind::down_monotone, std::move(name), Tri::yes, Tri::no, true, {}});
}

SetFunction make_table(int d, std::vector<double> values, std::string name) {
    require(d >= 1, "ground set size must be positive");
    require_ground_size(d, 24, "make_table");
    const std::uint64_t n = std::uint64_t{1} << d;
    require(values.size() == n, "table must list all 2^d subsets");
    require(values[0] == 0.0, "table must satisfy F(empty) = 0");
    bool integral = true;
    std::uint64_t covered = 0;
    for (std::uint64_t m = 1; m < n; ++m) {
        const double v = values[m];
        require(!std::isnan(v) && v > 0, "table values must be positive on nonempty sets");
        if (std::isfinite(v)) {
            covered |= m;
            integral = integral && is_integral(v);
        }
    }
    require(covered == n - 1, "finite-valued sets of the table must cover the ground set");
    const Tri mono = d <= 16 ? (monotone_by_table(d, values) ? Tri::yes : Tri::no) : Tri::unknown;
    auto table = std::make_shared<const std::vector<double>>(std::move(values));
    SetFunction f(d, [table](const SupportSet& s) { return (*table)[s.mask()]; },
                  {SetFunctionKind::table, std::move(name), mono, Tri::unknown, integral, {}});
    f.table_ = std::move(table);
    return f;
}

SetFunction make_weak_counterexample() {
    // Index: bit0 = 1, bit1 = 2, bit2 = 3.
    return make_table(3, {0, 1, 1, 1, 1, 2, 2, 3}, "counterexample");
}

std::vector<double> tabulate(const SetFunction& f) {
    const int d = f.ground_size();
    require_ground_size(d, 24, "tabulate");
    if (const auto* t = f.table()) return *t;
    const std::uint64_t n = std::uint64_t{1} << d;
    std::vector<double> out(n);
    for (std::uint64_t m = 0; m < n; ++m) out[m] = f.value_mask(m);
    return out;
}

SetFunction read_table(std::istream& in, int d, std::string name) {
    require_ground_size(d, 24, "read_table");
    const std::uint64_t n = std::uint64_t{1} << d;
    std::vector<double> values(n, std::nan(""));
    std::vector<bool> seen(n, false);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string mask_token, value_token, extra;
        if (!(fields >> mask_token)) continue;
        require(static_cast<bool>(fields >> value_token) && !(fields >> extra),
                "table line " + std::to_string(line_no) + ": expected 'bitmask value'");
        std::uint64_t mask = 0;
        const auto [ptr, ec] =
            std::from_chars(mask_token.data(), mask_token.data() + mask_token.size(), mask);
        require(ec == std::errc{} && ptr == mask_token.data() + mask_token.size() && mask < n,
                "table line " + std::to_string(line_no) + ": bad bitmask '" + mask_token + "'");
        require(!seen[mask], "table line " + std::to_string(line_no) + ": duplicate bitmask");
        seen[mask] = true;
        values[mask] = parse_double(value_token);
    }
    for (std::uint64_t m = 0; m < n; ++m)
        require(seen[m], "table is missing bitmask " + std::to_string(m));
    return make_table(d, std::move(values), std::move(name));
}

SetFunction load_table(const std::string& path, int d) {
    std::ifstream in(path);
    require(in.good(), "cannot open table file '" + path + "'");
    return read_table(in, d, "table:" + path);
}

void write_table(std::ostream& out, const SetFunction& f) {
    const auto values = tabulate(f);
    for (std::uint64_t m = 0; m < values.size(); ++m) {
        out << m << ' ';
        if (std::isinf(values[m]))
            out << "inf";
        else
            out << values[m];
        out << '\n';
    }
}

GroupFamily parse_group_family(std::string_view text, int d) {
    GroupFamily family;
    for (const auto& part : split(text, '/')) {
        std::string members = part;
        double weight = 1.0;
        if (const auto at = part.find('@'); at != std::string::npos) {
            members = trim(std::string_view(part).substr(0, at));
            weight = parse_double(trim(std::string_view(part).substr(at + 1)));
        }
        SupportSet g(d);
        for (const auto& tok : split(members, ',')) {
            if (tok.empty()) continue;
            g.insert(parse_int(tok));
        }
        family.groups.push_back(std::move(g));
        family.weights.push_back(weight);
    }
    family.validate(d);
    return family;
}

SetFunction parse_set_function(std::string_view spec, int d) {
    const auto colon = spec.find(':');
    const std::string head = trim(spec.substr(0, colon));
    const std::string tail = colon == std::string_view::npos ? "" : trim(spec.substr(colon + 1));
    if (head == "cardinality") return make_cardinality(d);
    if (head == "range") return make_range(d);
    if (head == "modified_range") return make_modified_range(d);
    if (head == "counterexample") {
        require(d == 3, "counterexample is defined on d = 3");
        return make_weak_counterexample();
    }
    if (head == "overlap") return make_overlap_count(d, parse_group_family(tail, d));
    if (head == "dispersive") return make_dispersive(d, parse_group_family(tail, d));
    if (head == "table") return load_table(tail, d);
    throw InvalidArgument("unknown set function spec '" + std::string(spec) + "'");
}

} // namespace combipen
