#include "combipen/envelopes.hpp"
#include "combipen/estimators.hpp"
#include "combipen/lab.hpp"
#include "combipen/penalty.hpp"
#include "combipen/structure.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace combipen;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %2d %-28s %8.1fs (limit %.0fs)  %s%s\n", pass ? "PASS" : "FAIL", id, name, secs, budget_s,
                out.detail.c_str(), in_time ? "" : "  [over time]");
    std::fflush(stdout);
}

Vector uniform_vector(int d, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector w(d);
    for (int j = 0; j < d; ++j) w[j] = u(rng);
    return w;
}

GroupFamily random_groups(int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 4);
    std::bernoulli_distribution in(0.4);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    GroupFamily fam;
    const int g = count(rng);
    for (int k = 0; k < g; ++k) {
        SupportSet s(d);
        while (s.empty())
            for (int j = 1; j <= d; ++j)
                if (in(rng)) s.insert(j);
        fam.groups.push_back(s);
        fam.weights.push_back(weight(rng));
    }
    // every element needs a group so that all atoms have positive value
    for (int j = 1; j <= d; ++j) {
        if (std::none_of(fam.groups.begin(), fam.groups.end(), [&](const SupportSet& s) { return s.contains(j); })) {
            fam.groups.push_back(SupportSet(d, {j}));
            fam.weights.push_back(weight(rng));
        }
    }
    return fam;
}

// Random partition of V into blocks of a dispersive function.
GroupFamily random_partition(int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> block(0, std::max(1, d / 2) - 1);
    std::vector<SupportSet> groups(static_cast<std::size_t>(std::max(1, d / 2)), SupportSet(d));
    for (int j = 1; j <= d; ++j) groups[static_cast<std::size_t>(block(rng))].insert(j);
    std::vector<SupportSet> nonempty;
    for (auto& g : groups)
        if (!g.empty()) nonempty.push_back(g);
    return GroupFamily::uniform(nonempty);
}

std::vector<double> random_monotone_table(int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> val(1, 2 * d);
    std::bernoulli_distribution flat(0.5);
    std::vector<double> v(std::size_t{1} << d, 0.0);
    for (std::size_t m = 1; m < v.size(); ++m) v[m] = val(rng);
    // Flattening with the largest submask value creates plateaus.
    for (int k = 0; k < d; ++k)
        for (std::size_t m = 0; m < v.size(); ++m)
            if (m >> k & 1) v[m] = std::max(v[m], v[m ^ (std::size_t{1} << k)]);
    if (flat(rng)) {
        for (std::size_t m = 1; m < v.size(); ++m) v[m] += std::popcount(m);
    }
    v[0] = 0;
    return v;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Hamming distances of adaptive Theta_inf-range at lambda_n = n^0.4 for
// n in {100, 200, 400, 800}, 20 seeds; also emitted as CSV.
struct ConsistencyRun {
    std::map<int, std::vector<double>> hamming;
    std::string csv;
};

ConsistencyRun consistency_run() {
    ConsistencyRun run;
    const std::vector<int> sizes{100, 200, 400, 800};
    const int d = 20, k = 8, seeds = 20;
    const auto base = make_named_penalty("theta_inf_range", d);
    InstanceOptions io;
    io.amplitude = 0.9;
    io.normalize_columns = false;
    std::ostringstream csv;
    csv << "n,seed,lambda,hamming,est_error\n";
    for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
        const int n = sizes[ni];
        const double lambda = std::pow(static_cast<double>(n), 0.4);
        for (int s = 0; s < seeds; ++s) {
            const auto inst = generate_instance(d, k, n, {DesignKind::iid, 0.0}, 0.05,
                                                instance_seed(2024, static_cast<int>(ni), s), io);
            const RegressionProblem pb(inst.x, inst.y);
            AdaptiveConfig ac;
            ac.alpha = 0.3;
            const auto r = fit_adaptive(pb, base, lambda, ac);
            const int h = hamming(support_of(r.w), inst.support);
            run.hamming[n].push_back(h);
            csv << format("%d,%d,%.17g,%d,%.17g\n", n, s, lambda, h, estimation_error(r.w, inst.w_star));
        }
    }
    run.csv = csv.str();
    return run;
}

std::string experiment_csv(const ExperimentResult& r) {
    std::ostringstream out;
    emit_csv(out, r.rows);
    return out.str();
}

ConsistencyRun first_consistency;
ExperimentResult first_experiment;

} // namespace

int main() {
    std::printf("acceptance: 13 criteria\n");

    criterion(1, "berhu equivalence", 30, [] {
        std::mt19937_64 rng(101);
        std::uniform_int_distribution<int> dim(1, 8);
        std::vector<AtomCollection> atoms;
        for (int d = 1; d <= 8; ++d) atoms.push_back(make_atoms("all", make_cardinality(d)));
        PenaltySpec spec;
        spec.p = 2;
        EnvelopeOptions eo;
        eo.gap_tol = 1e-11;
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const int d = dim(rng);
            const Vector w = uniform_vector(d, -2.5, 2.5, rng);
            const double v = evaluate_envelope(spec, atoms[static_cast<std::size_t>(d - 1)], w, eo).value;
            worst = std::max(worst, std::abs(v - berhu(w)));
        }
        return Outcome{worst <= 1e-6, format("max |theta_2 - berhu| = %.2e over 1000 points", worst)};
    });

    criterion(2, "submodular collapse", 60, [] {
        std::mt19937_64 rng(102);
        double gap_envelopes = 0, gap_lovasz = 0;
        int done = 0;
        for (int d = 3; d <= 8; ++d) {
            const int per = d == 8 ? 75 : 85;
            const auto f = make_overlap_count(d, random_groups(d, rng));
            const auto atoms = make_atoms("all", f);
            for (int i = 0; i < per; ++i, ++done) {
                const Vector w = uniform_vector(d, -1, 1, rng);
                const double om = omega_inf(w, atoms).value;
                const double th = theta_inf(w, atoms).value;
                gap_envelopes = std::max(gap_envelopes, std::abs(th - om));
                gap_lovasz = std::max(gap_lovasz, std::abs(om - lovasz_extension(f, w)));
            }
        }
        return Outcome{done >= 500 && gap_envelopes <= 1e-8 && gap_lovasz <= 1e-8,
                       format("%d points, max|theta-omega| = %.1e, max|omega-lovasz| = %.1e", done, gap_envelopes,
                              gap_lovasz)};
    });

    criterion(3, "lce dichotomy for range", 60, [] {
        int mismatches = 0, checked = 0;
        for (int d = 4; d <= 8; ++d) {
            const auto atoms = make_atoms("all", make_range(d));
            const auto hom = tabulate(lce(atoms, PenaltyKind::homogeneous));
            const auto non = tabulate(lce(atoms, PenaltyKind::non_homogeneous));
            const auto range = tabulate(make_range(d));
            for (std::size_t m = 0; m < hom.size(); ++m, ++checked) {
                if (hom[m] != static_cast<double>(std::popcount(m))) ++mismatches;
                if (non[m] != range[m]) ++mismatches;
            }
        }
        return Outcome{mismatches == 0, format("%d sets, %d mismatches", checked, mismatches)};
    });

    criterion(4, "rho-submodularity", 30, [] {
        bool ok = true;
        std::string seen;
        for (int d = 3; d <= 8; ++d) {
            const auto rho = rho_submodularity(make_range(d));
            const bool exact = rho && rho->exact && rho->exact->first == 1 && rho->exact->second == d - 1;
            ok = ok && exact;
            seen += rho && rho->exact ? format("%lld/%lld ", rho->exact->first, rho->exact->second) : "? ";
        }
        const auto ce = make_weak_counterexample();
        const bool none = !rho_submodularity(ce);
        const double gamma = min_weak_submodularity_ratio(ce);
        return Outcome{ok && none && gamma > 0,
                       format("range rho: %scounterexample rho %s, min gamma %.3g", seen.c_str(),
                              none ? "none" : "defined", gamma)};
    });

    criterion(5, "stable-set catalogues", 60, [] {
        std::mt19937_64 rng(105);
        int bad = 0, catalogues = 0;
        for (int d = 2; d <= 8; ++d) {
            for (auto mode : {StabilityMode::weak, StabilityMode::strong}) {
                const auto range = enumerate_stable_sets(make_range(d), mode);
                bool ok = range.size() == static_cast<std::size_t>(d * (d + 1) / 2 + 1);
                for (const auto& s : range) ok = ok && (s.empty() || s.is_interval());
                bad += !ok;

                const auto disp = make_dispersive(d, random_partition(d, rng));
                std::vector<SupportSet> feasible;
                for (std::uint64_t m = 0; m < (1ull << d); ++m)
                    if (std::isfinite(disp.value_mask(m))) feasible.push_back(SupportSet::from_mask(d, m));
                std::sort(feasible.begin(), feasible.end());
                bad += enumerate_stable_sets(disp, mode) != feasible;

                bad += enumerate_stable_sets(make_cardinality(d), mode).size() != (std::size_t{1} << d);
                catalogues += 3;
            }
        }
        return Outcome{bad == 0, format("%d catalogues, %d wrong", catalogues, bad)};
    });

    criterion(6, "weak = strong iff rho", 120, [] {
        std::mt19937_64 rng(106);
        std::uniform_int_distribution<int> dim(3, 7);
        int agree = 0, with_rho = 0, equal_sets = 0;
        std::string counter;
        for (int t = 0; t < 100; ++t) {
            const int d = dim(rng);
            const auto f = make_table(d, random_monotone_table(d, rng));
            const bool rho = rho_submodularity(f).has_value();
            const bool same =
                enumerate_stable_sets(f, StabilityMode::weak) == enumerate_stable_sets(f, StabilityMode::strong);
            with_rho += rho;
            equal_sets += same;
            if (rho == same) ++agree;
            else if (counter.empty()) counter = format(" first disagreement at table %d (rho %s, equal %s)", t,
                                                       rho ? "yes" : "none", same ? "yes" : "no");
        }
        return Outcome{agree == 100, format("%d/100 agree; rho defined %d, weak==strong %d%s", agree, with_rho,
                                            equal_sets, counter.c_str())};
    });

    criterion(7, "stable supports have margins", 180, [] {
        std::mt19937_64 rng(107);
        std::uniform_real_distribution<double> mag(0.1, 0.9);
        std::bernoulli_distribution sign(0.5);
        int checks = 0, failed = 0;
        double smallest = kInf;
        struct Case {
            SetFunction f;
            const char* atoms;
        };
        const int d = 7;
        const std::vector<Case> cases{{make_range(d), "intervals"},
                                      {make_dispersive(d, random_partition(d, rng)), "all"}};
        for (const auto& c : cases) {
            const auto atoms = make_atoms(c.atoms, c.f);
            for (const auto& j : enumerate_stable_sets(c.f, StabilityMode::strong)) {
                if (j.size() == d) continue;
                for (int k = 0; k < 20; ++k) {
                    Vector w = Vector::Zero(d);
                    for (int i : j.members()) w[i - 1] = sign(rng) ? mag(rng) : -mag(rng);
                    for (double p : {2.0, kInf}) {
                        for (auto kind : {PenaltyKind::homogeneous, PenaltyKind::non_homogeneous}) {
                            PenaltySpec spec;
                            spec.kind = kind;
                            spec.p = p;
                            const double m = decomposability_margin(spec, atoms, w, j).margin;
                            smallest = std::min(smallest, m);
                            ++checks;
                            if (!(m > 1e-7)) ++failed;
                        }
                    }
                }
            }
        }
        return Outcome{failed == 0, format("%d margins, %d <= 1e-7, smallest %.3g", checks, failed, smallest)};
    });

    criterion(8, "estimates have stable supports", 300, [] {
        const std::vector<std::string> names{"l1", "theta_inf_range", "group_l1_linf_modified_range", "lasso"};
        const std::vector<double> lambdas{0.02, 0.1, 0.5};
        int trials = 0, passed = 0;
        for (std::size_t p = 0; p < names.size(); ++p) {
            std::vector<RegressionProblem> problems;
            for (int s = 0; s < 25; ++s) {
                const double sigma = 0.02 * (1 + s % 5);
                const auto inst = generate_instance(12, 4, 40, {DesignKind::correlated, 0.3}, sigma,
                                                    instance_seed(808, static_cast<int>(p), s));
                problems.emplace_back(inst.x, inst.y);
            }
            for (std::size_t l = 0; l < lambdas.size(); ++l) {
                std::vector<RegressionProblem> slice;
                for (std::size_t s = l; s < problems.size(); s += lambdas.size()) slice.push_back(problems[s]);
                const auto rep = theorem1_check(slice, make_named_penalty(names[p], 12), lambdas[l]);
                trials += rep.trials;
                passed += rep.passed;
            }
        }
        return Outcome{trials == 100 && passed == 100, format("%d/%d fits decomposable at their support", passed,
                                                              trials)};
    });

    criterion(9, "biconjugate and cover oracles", 120, [] {
        const auto atoms = make_atoms("all", make_range(2));
        const oracle::Grid2 grid{-2.0, 2.0, 41};
        const auto table = tabulate(make_range(2));
        const auto fp = [&](double a, double b) {
            const std::uint64_t m = (a != 0 ? 1u : 0u) | (b != 0 ? 2u : 0u);
            return 0.5 * table[m] + 0.5 * (a * a + b * b);
        };
        const Eigen::MatrixXd bic = oracle::biconjugate_on_grid(fp, grid);
        double worst = 0;
        for (int i = 0; i < grid.n; ++i) {
            for (int j = 0; j < grid.n; ++j) {
                Vector w(2);
                w << grid.at(i), grid.at(j);
                worst = std::max(worst, std::abs(theta_p(w, atoms, 2).value - bic(i, j)));
            }
        }

        std::mt19937_64 rng(109);
        std::uniform_int_distribution<int> val(1, 5);
        std::uniform_int_distribution<int> dim(2, 4);
        std::bernoulli_distribution simplex(0.5);
        double cover_gap = 0;
        for (int t = 0; t < 200; ++t) {
            const int d = dim(rng);
            std::vector<double> v(std::size_t{1} << d);
            for (std::size_t m = 1; m < v.size(); ++m) v[m] = val(rng);
            const auto coll = make_atoms("all", make_table(d, v));
            std::vector<oracle::TinyAtom> tiny;
            for (const auto& a : coll.atoms()) tiny.push_back({a.set.mask(), a.value});
            const Vector w = uniform_vector(d, -1, 1, rng);
            const bool s = simplex(rng);
            const auto ref = oracle::exhaustive_cover(tiny, d, w, s);
            const double lp = s ? theta_inf(w, coll).value : omega_inf(w, coll).value;
            cover_gap = std::max(cover_gap, ref ? std::abs(*ref - lp) : kInf);
        }
        return Outcome{worst <= 2e-2 && cover_gap <= 1e-9,
                       format("grid max diff %.2e (41x41), cover max diff %.1e (200 LPs)", worst, cover_gap)};
    });

    criterion(10, "majorizer", 60, [] {
        std::mt19937_64 rng(110);
        const int d = 6;
        const auto theta = make_named_penalty("theta_inf_range", d);
        PenaltySpec spec;
        spec.kind = PenaltyKind::homogeneous;
        spec.p = 2;
        const Penalty omega(spec, std::make_shared<const AtomCollection>(make_atoms("all", make_cardinality(d))));
        int violations = 0, loose = 0;
        for (const Penalty* pen : {&theta, &omega}) {
            for (int i = 0; i < 500; ++i) {
                const Vector w = uniform_vector(d, -1, 1, rng);
                const Vector w0 = uniform_vector(d, -1, 1, rng);
                const auto m = majorizer(*pen, w, w0, 0.3);
                if (m.lhs > m.rhs + 1e-10) ++violations;
                const auto at = majorizer(*pen, w0, w0, 0.3);
                if (std::abs(at.lhs - at.rhs) > 1e-10) ++loose;
            }
        }
        return Outcome{violations == 0 && loose == 0,
                       format("1000 pairs, %d violations, %d not tight at w0", violations, loose)};
    });

    criterion(11, "consistency trend", 600, [] {
        first_consistency = consistency_run();
        std::string meds;
        bool monotone = true;
        double prev = kInf;
        for (const auto& [n, h] : first_consistency.hamming) {
            const double med = median(h);
            monotone = monotone && med <= prev;
            prev = med;
            meds += format("n=%d:%g ", n, med);
        }
        const auto& last = first_consistency.hamming.at(800);
        const int zeros = static_cast<int>(std::count(last.begin(), last.end(), 0.0));
        return Outcome{monotone && zeros >= 18,
                       format("median hamming %s| exact at n=800 in %d/20", meds.c_str(), zeros)};
    });

    criterion(12, "desk-scale support recovery", 900, [] {
        const ExperimentConfig config;
        first_experiment = run_experiment(config);
        const auto& rows = first_experiment.rows;
        auto cell = [&](const std::string& reg, bool adaptive, double sigma, int seed) {
            for (const auto& r : rows)
                if (r.regularizer == reg && r.adaptive == adaptive && r.sigma == sigma && r.seed == seed)
                    return r.best_hamming;
            throw Error("missing row " + reg);
        };
        // (a) per noise level, adaptive no worse than non-adaptive in >= 4/5 seeds
        bool a = true;
        std::string a_detail;
        for (const std::string reg : {"l1", "theta_inf_range"}) {
            for (double sigma : config.sigmas) {
                int wins = 0, strict = 0;
                for (int s = 0; s < config.seeds; ++s) {
                    const double on = cell(reg, true, sigma, s);
                    const double off = cell(reg, false, sigma, s);
                    wins += on <= off;
                    strict += on < off;
                }
                a = a && wins >= 4;
                a_detail += format("%s@%g %d(%d) ", reg == "l1" ? "l1" : "th", sigma, wins, strict);
            }
        }
        // (b) adaptive Theta_inf-range no worse than adaptive l1 on the mean
        bool b = true;
        for (double sigma : config.sigmas) b = b && cell("theta_inf_range", true, sigma, -1) <= cell("l1", true, sigma, -1);
        // (c) non-adaptive modified-range l1/l_inf worst at the lowest noise
        const double lo = config.sigmas.front();
        const double group = cell("group_l1_linf_modified_range", false, lo, -1);
        const bool c = group >= cell("l1", false, lo, -1) && group >= cell("theta_inf_range", false, lo, -1);
        return Outcome{a && b && c && first_experiment.failures == 0,
                       format("(a) %s| (b) %s (c) %s, failures %d", a_detail.c_str(), b ? "yes" : "no",
                              c ? "yes" : "no", first_experiment.failures)};
    });

    criterion(13, "determinism", 1500, [] {
        const auto again = consistency_run();
        const auto sweep = run_experiment(ExperimentConfig{});
        const bool same11 = again.csv == first_consistency.csv && !again.csv.empty();
        const bool same12 = experiment_csv(sweep) == experiment_csv(first_experiment) && !sweep.rows.empty();
        return Outcome{same11 && same12, format("consistency csv %s, sweep csv %s (%zu bytes)",
                                                same11 ? "identical" : "differs", same12 ? "identical" : "differs",
                                                experiment_csv(sweep).size())};
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
