#include <doctest.h>

#include "combipen/numerics/fista.hpp"
#include "combipen/numerics/frank_wolfe.hpp"
#include "combipen/numerics/linalg.hpp"
#include "combipen/numerics/simplex.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace combipen;
using namespace combipen::numerics;

namespace {

class UnitVertices : public VertexSet {
public:
    explicit UnitVertices(int d) : d_(d) {}
    int dim() const override { return d_; }
    double dot(int v, const Vector& g) const override { return g[v]; }
    int argmin_dot(const Vector& g) const override {
        Eigen::Index i = 0;
        g.minCoeff(&i);
        return static_cast<int>(i);
    }
    void axpy(int v, double a, Vector& x) const override { x[v] += a; }

private:
    int d_;
};

class DistanceTo : public SmoothObjective {
public:
    explicit DistanceTo(Vector p) : p_(std::move(p)) {}
    double value(const Vector& x) const override { return 0.5 * (x - p_).squaredNorm(); }
    Vector gradient(const Vector& x) const override { return x - p_; }

private:
    Vector p_;
};

Vector project_simplex(const Vector& p) {
    std::vector<double> s(p.data(), p.data() + p.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double acc = 0, theta = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        acc += s[k];
        const double t = (acc - 1.0) / static_cast<double>(k + 1);
        if (s[k] - t > 0) theta = t;
    }
    return (p.array() - theta).max(0.0).matrix();
}

} // namespace

TEST_SUITE("numerics") {

TEST_CASE("simplex agrees with vertex enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 150; ++trial) {
        const int m = 2 + trial % 3;
        const int n = 2 + trial % 4;
        Matrix a(m + 1, n);
        Vector b(m + 1), c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = u(rng);
            b[i] = u(rng) + 0.2;
        }
        a.row(m).setOnes();
        b[m] = 5;
        for (int j = 0; j < n; ++j) c[j] = u(rng);
        const auto ref = oracle::lp_by_vertices(a, b, c);

        LinearProgram lp{c, a, b, std::vector<Sense>(m + 1, Sense::less_equal), {}};
        const auto res = simplex_solve(lp);
        if (!ref) {
            CHECK(res.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(res.status == LpStatus::optimal);
        CHECK(res.value == doctest::Approx(*ref).epsilon(1e-9));
        // Strong duality and dual feasibility.
        CHECK(b.dot(res.duals) == doctest::Approx(res.value).epsilon(1e-8));
        CHECK((res.duals.array() <= 1e-12).all());
        CHECK(((c - a.transpose() * res.duals).array() >= -1e-9).all());
    }
}

TEST_CASE("simplex statuses and senses") {
    Matrix a(1, 2);
    a << 1, 1;
    Vector b(1);
    b << 1;
    Vector c(2);
    c << -1, 0;
    LinearProgram unbounded{c, -a, -b, {Sense::less_equal}, {}};
    CHECK(simplex_solve(unbounded).status == LpStatus::unbounded);

    LinearProgram eq{Vector::Ones(2), a, b, {Sense::equal}, {}};
    const auto r = simplex_solve(eq);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(1));

    Matrix a2(2, 1);
    a2 << 1, 1;
    Vector b2(2);
    b2 << 1, 2;
    LinearProgram infeasible{Vector::Ones(1), a2, b2, {Sense::less_equal, Sense::greater_equal}, {}};
    CHECK(simplex_solve(infeasible).status == LpStatus::infeasible);

    LinearProgram free_var{Vector::Ones(1), Matrix::Ones(1, 1), -Vector::Ones(1), {Sense::greater_equal}, {true}};
    const auto f = simplex_solve(free_var);
    REQUIRE(f.status == LpStatus::optimal);
    CHECK(f.value == doctest::Approx(-1));

    LinearProgram broken{Vector::Ones(2), a, b, {}, {}};
    CHECK_THROWS_AS(simplex_solve(broken), InvalidArgument);
}

TEST_CASE("Frank-Wolfe projects onto the simplex") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + trial % 6;
        Vector p(d);
        for (int j = 0; j < d; ++j) p[j] = g(rng);
        const DistanceTo f(p);
        const UnitVertices v(d);
        FrankWolfeOptions o;
        o.gap_tol = 1e-13;
        const auto res = frank_wolfe(f, v, {{0, 1.0}}, o);
        CHECK(res.converged);
        CHECK((res.point - project_simplex(p)).norm() < 1e-6);
    }
}

TEST_CASE("FISTA matches coordinate descent on the lasso") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const int n = 40, d = 12;
    Matrix x(n, d);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = g(rng);
        y[i] = g(rng) + (i % 3 == 0 ? 2.0 : 0.0);
    }
    const double lambda = 4.0;
    SmoothPart smooth;
    smooth.value = [&](const Vector& w) { return 0.5 * (y - x * w).squaredNorm(); };
    smooth.gradient = [&](const Vector& w) { return Vector(x.transpose() * (x * w - y)); };
    smooth.lipschitz = lambda_max_gram(x);
    const ProxOperator soft = [&](const Vector& v, double t) {
        return Vector((v.array().abs() - t * lambda).max(0.0) * v.array().sign());
    };
    FistaOptions o;
    o.tol = 1e-11;
    const auto res = fista(smooth, soft, Vector::Zero(d), o);
    CHECK(res.converged);
    const Vector ref = oracle::cd_lasso(x, y, lambda, Vector::Ones(d));
    CHECK((res.point - ref).norm() < 1e-7);
}

TEST_CASE("linear algebra helpers") {
    Matrix q(3, 3);
    q << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Vector b = Vector::LinSpaced(3, 1, 3);
    CHECK((q * cholesky_solve(q, b) - b).norm() < 1e-12);
    CHECK_THROWS_AS(cholesky_solve(-q, b), InvalidArgument);

    const Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    CHECK(min_eigenvalue(q) == doctest::Approx(es.eigenvalues()[0]));

    Matrix x(5, 2);
    x << 1, 0, 0, 2, 1, 1, 0, 0, 3, 1;
    const Eigen::SelfAdjointEigenSolver<Matrix> gram(x.transpose() * x);
    CHECK(lambda_max_gram(x) == doctest::Approx(gram.eigenvalues()[1]).epsilon(1e-5));
}

}
