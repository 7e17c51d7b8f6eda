#include <doctest.h>

#include "combipen/penalty.hpp"
#include "moment.hpp"

#include <random>

using namespace combipen;

namespace {

double prox_objective(const Penalty& pen, const Vector& z, const Vector& v, double t) {
    return 0.5 * (z - v).squaredNorm() + t * pen.value(z);
}

// z should beat every nearby point.
void check_prox_optimal(const Penalty& pen, const Vector& v, double t, std::mt19937_64& rng) {
    const Vector z = pen.prox(v, t);
    const double best = prox_objective(pen, z, v, t);
    std::normal_distribution<double> g;
    for (int k = 0; k < 25; ++k) {
        Vector u = z;
        for (Eigen::Index j = 0; j < u.size(); ++j) u[j] += (k < 12 ? 1e-3 : 1e-1) * g(rng);
        CHECK(prox_objective(pen, u, v, t) >= best - 1e-9);
    }
}

} // namespace

TEST_SUITE("penalty") {

TEST_CASE("l1 route is soft thresholding") {
    const auto pen = make_named_penalty("l1", 6);
    CHECK(pen.route() == Penalty::Route::weighted_l1);
    Vector v(6);
    v << 3, -0.2, 0.5, -2, 0, 1;
    const Vector z = pen.prox(v, 0.5);
    Vector expect(6);
    expect << 2.5, 0, 0, -1.5, 0, 0.5;
    CHECK((z - expect).norm() < 1e-14);
    CHECK(pen.value(v) == doctest::Approx(v.lpNorm<1>()));
    CHECK(make_named_penalty("lasso", 6).value(v) == doctest::Approx(v.lpNorm<1>()));
}

TEST_CASE("modified range penalty equals its group closed form") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    const auto pen = make_named_penalty("group_l1_linf_modified_range", 7);
    for (int k = 0; k < 10; ++k) {
        Vector w(7);
        for (int j = 0; j < 7; ++j) w[j] = (k % 2 && j < 3) ? 0.0 : g(rng);
        CHECK(pen.value(w) == doctest::Approx(group_linf_modified_range(w)).epsilon(1e-9));
    }
}

TEST_CASE("prox optimality") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    const int d = 6;
    for (const std::string name : {"theta_inf_range", "group_l1_linf_modified_range"}) {
        const auto pen = make_named_penalty(name, d);
        for (double t : {0.05, 0.4, 2.0}) {
            Vector v(d);
            for (int j = 0; j < d; ++j) v[j] = 0.8 * g(rng);
            check_prox_optimal(pen, v, t, rng);
        }
    }
    auto atoms = std::make_shared<const AtomCollection>(make_atoms("intervals", make_range(d)));
    for (auto kind : {PenaltyKind::homogeneous, PenaltyKind::non_homogeneous}) {
        PenaltySpec spec;
        spec.kind = kind;
        spec.p = 2;
        const Penalty pen(spec, atoms);
        for (double t : {0.1, 1.0}) {
            Vector v(d);
            for (int j = 0; j < d; ++j) v[j] = g(rng);
            check_prox_optimal(pen, v, t, rng);
        }
    }
}

TEST_CASE("clipped prox active set matches Frank-Wolfe") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 80; ++trial) {
        const int d = 3 + trial % 5;
        const auto atoms = trial % 2 ? make_atoms("all", make_range(d)) : make_atoms("intervals", make_range(d));
        Vector b(d), c(d);
        for (int j = 0; j < d; ++j) {
            c[j] = u(rng) < 0.5 ? 1.07 : 300 + 1000 * u(rng);
            b[j] = c[j] > 2 ? 1e-3 * u(rng) : 1.5 * u(rng);
        }
        const double t = std::pow(10.0, -4 * u(rng));
        const detail::ClippedQuadratic model(b, c);
        numerics::FrankWolfeOptions o;
        o.gap_tol = 0;
        o.abs_gap_tol = 1e-15;
        o.max_iterations = 200000;
        for (auto mode : {detail::MomentMode::simplex, detail::MomentMode::cone}) {
            double radius = 1e-9;
            for (int j = 0; j < d; ++j) radius += c[j] * b[j] * atoms.cheapest_cover(j + 1);
            const auto fast = detail::solve_clipped_prox(atoms, mode, radius * 1.01, model, t, {}, o);
            const auto slow = detail::solve_moment(atoms, mode, radius * 1.01, model, t, {}, o);
            CHECK(fast.converged);
            if (slow.converged) CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-7));
            CHECK(fast.value <= slow.value + 1e-12);
        }
    }
}

TEST_CASE("infinite weights pin coordinates to zero") {
    const auto pen = make_named_penalty("theta_inf_range", 4);
    Vector c(4);
    c << 1, kInf, 1, 1;
    const auto weighted = pen.with_weights(c);
    Vector v(4);
    v << 0.5, 0.7, 0.2, 0.1;
    const Vector z = weighted.prox(v, 0.01);
    CHECK(z[1] == 0);
    CHECK(z[0] > 0);
    Vector w = Vector::Zero(4);
    w[1] = 0.1;
    CHECK(std::isinf(weighted.value(w)));
}

TEST_CASE("workspace warm starts do not change the answer") {
    const auto pen = make_named_penalty("theta_inf_range", 8);
    std::mt19937_64 rng(15);
    std::normal_distribution<double> g;
    ProxWorkspace ws;
    for (int k = 0; k < 5; ++k) {
        Vector v(8);
        for (int j = 0; j < 8; ++j) v[j] = 0.5 * g(rng);
        const Vector cold = pen.prox(v, 0.1);
        const Vector warm = pen.prox(v, 0.1, &ws);
        CHECK((cold - warm).norm() < 1e-9);
    }
}

TEST_CASE("unknown names") {
    CHECK_THROWS_AS(make_named_penalty("ridge", 4), InvalidArgument);
}

}
