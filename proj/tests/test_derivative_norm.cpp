#include "doctest.h"
#include "fixtures.hpp"

#include "pitest/derivative_norm.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pitest;
using fixtures::vec;

namespace {

Dataset two_rows(int cols)
{
    RowMatrix rows = RowMatrix::Zero(2, cols);
    rows(1, 0) = 1.0;
    return fixtures::dataset(rows);
}

/// Evaluator on rows drawn around A with the unit-ball family.
EmpiricalEvaluator bilinear_evaluator(const Matrix& a, std::size_t n, double noise, std::uint64_t seed,
                                      bool general = false)
{
    const Dataset data = fixtures::bilinear_data(a, Vector::Zero(a.cols()), n, noise, seed);
    const int k = static_cast<int>(a.rows());
    const int p = static_cast<int>(a.cols());
    return EmpiricalEvaluator(general ? fixtures::bilinear_general(k, p) : fixtures::bilinear_model(k, p), data,
                              TestFunctionFamily::weighted_ball(Matrix::Identity(k, k)));
}

/// Smooth non-affine model g = (exp(a theta_1) - y, theta_1 theta_2 x) on rows (a, x, y).
MomentModel smooth_model(bool analytic)
{
    MomentModel m(2, 2, [](std::span<const double> row, const Vector& th) {
        return vec({std::exp(row[0] * th(0)) - row[2], th(0) * th(1) * row[1]});
    });
    if (analytic) {
        m.with_jacobian([](std::span<const double> row, const Vector& th) {
            Matrix j(2, 2);
            j << row[0] * std::exp(row[0] * th(0)), 0.0, th(1) * row[1], th(0) * row[1];
            return j;
        });
    }
    return m;
}

Dataset smooth_data(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    RowMatrix rows(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        rows(i, 0) = 0.5 + 0.2 * z(rng);
        rows(i, 1) = 1.0 + z(rng);
        rows(i, 2) = 1.0 + z(rng);
    }
    return fixtures::dataset(rows);
}

Vector random_unit(std::mt19937_64& rng, int k)
{
    std::normal_distribution<double> z;
    Vector t(k);
    for (int i = 0; i < k; ++i) {
        t(i) = z(rng);
    }
    return t / t.norm();
}

} // namespace

TEST_CASE("Jacobian examples")
{
    MomentModel curve(2, 1, [](std::span<const double>, const Vector& th) { return vec({th(0) * th(0), th(0)}); });
    const EmpiricalEvaluator ev(curve, two_rows(1), TestFunctionFamily::weighted_ball(Matrix::Identity(2, 2)));
    const auto space = ParameterSpace::box(vec({-5}), vec({5}));
    const JacobianEstimate j = jacobian(ev, vec({1}), &space);
    CHECK(j.method == JacobianEstimate::Method::central_difference);
    CHECK((j.matrix - vec({2, 1})).norm() < 1e-6);
    CHECK(j.step > 0.0);
    CHECK_THROWS_AS(jacobian(ev, vec({5}), &space), PreconditionError);

    Matrix a(3, 2);
    a << 1, 2, -1, 0.5, 0.3, 0.7;
    const EmpiricalEvaluator affine = bilinear_evaluator(a, 50, 0.0, 1);
    const JacobianEstimate ja = jacobian(affine, vec({0.2, 0.1}));
    CHECK(ja.method == JacobianEstimate::Method::analytic);
    CHECK((ja.matrix - a).norm() < 1e-12);

    MomentModel opaque(3, 2, [a](std::span<const double>, const Vector& th) { return Vector(a * th - vec({1, 2, 3})); });
    const EmpiricalEvaluator fd(opaque, two_rows(1), TestFunctionFamily::weighted_ball(Matrix::Identity(3, 3)));
    CHECK((jacobian(fd, vec({0.4, -1.3})).matrix - a).norm() < 1e-6);
}

TEST_CASE("analytic Jacobians agree with central differences")
{
    const EmpiricalEvaluator smooth(smooth_model(true), smooth_data(200, 3),
                                    TestFunctionFamily::weighted_ball(Matrix::Identity(2, 2)));
    for (const Vector& th : {vec({0.1, 0.5}), vec({-1.0, 2.0}), vec({1.5, -0.3})}) {
        CHECK(check_jacobian(smooth, th) <= 1e-5);
    }
    Matrix a(3, 2);
    a << 1, 0.2, 0.3, 1, 0.5, -0.4;
    const EmpiricalEvaluator gmm = bilinear_evaluator(a, 100, 0.3, 5, true);
    CHECK(check_jacobian(gmm, vec({0.3, -0.2})) <= 1e-5);
}

TEST_CASE("psi_hat on the identity bilinear model")
{
    const EmpiricalEvaluator ev = bilinear_evaluator(Matrix::Identity(2, 2), 20, 0.0, 2);
    const auto space = ParameterSpace::ball(vec({0, 0}), 100.0);
    for (bool closed : {true, false}) {
        PsiSurface surface(ev, space, 0.3, 10.0);
        surface.set_closed_form(closed);
        CHECK(surface.psi_hat(vec({1, 2}), ev.family().element(vec({1, 0}))) == doctest::Approx(-1.0).epsilon(1e-8));
        const PsiSolution s = surface.solve_hat(vec({1, 2}), ev.family().element(vec({0.6, 0.8})));
        CHECK(s.value == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK((s.argmin - vec({1 - 0.18, 2 - 0.24})).norm() < 1e-5);
    }

    Matrix col(2, 1);
    col << 1, 1;
    const EmpiricalEvaluator flat = bilinear_evaluator(col, 20, 0.0, 2);
    PsiSurface s(flat, ParameterSpace::ball(vec({0}), 100.0), 0.3, 10.0);
    CHECK(std::abs(s.psi_hat(vec({0.5}), flat.family().element(vec({1, -1}) / std::sqrt(2.0)))) < 1e-12);
    s.set_closed_form(false);
    CHECK(std::abs(s.psi_hat(vec({0.5}), flat.family().element(vec({1, -1}) / std::sqrt(2.0)))) < 1e-12);
}

TEST_CASE("psi_hat on a noisy linear fixture tracks the closed-form gamma")
{
    Matrix a(3, 2);
    a << 1, 0.2, 0.3, 1, 0.5, -0.4;
    const std::size_t n = 1000;
    const EmpiricalEvaluator ev = bilinear_evaluator(a, n, 0.5, 17);
    const double delta = std::pow(static_cast<double>(n), -0.25);
    const auto space = ParameterSpace::box(vec({-3, -3}), vec({3, 3}));
    PsiSurface surface(ev, space, delta, 10.0);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector t = random_unit(rng, 3);
        const double gamma = linear_gamma(a, t);
        CHECK(gamma == doctest::Approx(-(a.transpose() * t).norm()));
        CHECK(std::abs(surface.psi_hat(vec({0.2, -0.4}), ev.family().element(t)) - gamma) <= delta);
    }
}

TEST_CASE("psi_hat is nonpositive and homogeneous")
{
    const EmpiricalEvaluator smooth(smooth_model(true), smooth_data(100, 9),
                                    TestFunctionFamily::weighted_ball(Matrix::Identity(2, 2)));
    const auto space = ParameterSpace::box(vec({-1, -1}), vec({1, 1}));
    PsiSurface surface(smooth, space, 0.25, 10.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Vector theta = vec({u(rng), trial % 4 == 0 ? 1.0 : u(rng)});
        const Vector t = random_unit(rng, 2);
        CHECK(surface.psi_hat(theta, smooth.family().element(t)) <= 1e-8);
    }

    Matrix a(3, 2);
    a << 1, 0.2, 0.3, 1, 0.5, -0.4;
    const EmpiricalEvaluator ev = bilinear_evaluator(a, 100, 0.4, 23);
    for (bool closed : {true, false}) {
        PsiSurface lin(ev, space, 0.3, 10.0);
        lin.set_closed_form(closed);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector theta = vec({u(rng), u(rng)});
            const Vector t = random_unit(rng, 3);
            const double one = lin.psi_hat(theta, ev.family().element(t));
            const double two = lin.psi_hat(theta, ev.family().element(2.0 * t));
            CHECK(std::abs(two - 2.0 * one) <= 1e-10);
        }
    }
}

TEST_CASE("psi_hat is increasing in delta on a ball")
{
    Matrix a(2, 2);
    a << 1, 0.5, -0.3, 1;
    const EmpiricalEvaluator ev = bilinear_evaluator(a, 100, 0.3, 31);
    const auto space = ParameterSpace::ball(vec({0, 0}), 1.0);
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector theta = 0.95 * random_unit(rng, 2);
        const Vector t = random_unit(rng, 2);
        PsiSurface wide(ev, space, 0.4, 10.0);
        PsiSurface narrow(ev, space, 0.2, 10.0);
        CHECK(narrow.psi_hat(theta, ev.family().element(t)) <= wide.psi_hat(theta, ev.family().element(t)) + 1e-8);
    }
}

TEST_CASE("psi_tilde relaxes psi_hat")
{
    Matrix a(3, 2);
    a << 1, 0.2, 0.3, 1, 0.5, -0.4;
    const Dataset data = fixtures::bilinear_data(a, vec({0, 0}), 100, 0.4, 41);
    MomentModel model = fixtures::bilinear_model(3, 2);
    model.with_lipschitz(2.0);
    const EmpiricalEvaluator ev(model, data, TestFunctionFamily::weighted_ball(Matrix::Identity(3, 3)));
    const auto space = ParameterSpace::box(vec({-1, -1}), vec({1, 1}));
    PsiSurface surface(ev, space, 0.3, 4.0, PsiMode::lagrangian);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (bool closed : {true, false}) {
        surface.set_closed_form(closed);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector theta = vec({u(rng), trial % 3 == 0 ? -1.0 : u(rng)});
            const TestFunction t = ev.family().element(random_unit(rng, 3));
            CHECK(surface.psi_tilde(theta, t) <= surface.psi_hat(theta, t) + 1e-8);
            CHECK(surface(theta, t) == surface.psi_tilde(theta, t));
        }
    }

    CHECK_THROWS_AS(PsiSurface(ev, space, 0.3, 2.0, PsiMode::lagrangian), ConfigError);
    const EmpiricalEvaluator undeclared = bilinear_evaluator(a, 50, 0.4, 3);
    CHECK_THROWS_AS(PsiSurface(undeclared, space, 0.3, 4.0, PsiMode::lagrangian), ConfigError);
    PsiSurface constrained(undeclared, space, 0.3, 4.0);
    CHECK_THROWS_AS(constrained.psi_tilde(vec({0, 0}), undeclared.family().element(vec({1, 0, 0}))), ConfigError);
}

TEST_CASE("moments constant in theta have zero derivative norm")
{
    MomentModel constant(2, 2, [](std::span<const double> row, const Vector&) { return vec({row[0], row[1]}); });
    constant.with_lipschitz(0.0);
    RowMatrix rows(3, 2);
    rows << 1, 2, -1, 0.5, 3, 3;
    const EmpiricalEvaluator ev(constant, fixtures::dataset(rows), TestFunctionFamily::weighted_ball(Matrix::Identity(2, 2)));
    const auto space = ParameterSpace::box(vec({-1, -1}), vec({1, 1}));
    PsiSurface surface(ev, space, 0.3, 1.0, PsiMode::lagrangian);
    const TestFunction t = ev.family().element(vec({0.6, -0.8}));
    CHECK(std::abs(surface.psi_hat(vec({0.2, 0.9}), t)) <= 1e-12);
    CHECK(std::abs(surface.psi_tilde(vec({0.2, 0.9}), t)) <= 1e-12);
}

TEST_CASE("small psi_hat recovers the annihilated directions")
{
    Matrix a(3, 1);
    a << 1, 2, -1;
    const std::size_t n = 1000;
    const EmpiricalEvaluator ev = bilinear_evaluator(a, n, 0.3, 5);
    const double delta = std::pow(static_cast<double>(n), -0.25);
    const double q = std::pow(static_cast<double>(n), -0.5) / delta;
    const double eps = 2.0 * q;
    PsiSurface surface(ev, ParameterSpace::box(vec({-2}), vec({2})), delta, 10.0);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 40; ++j) {
            const double phi = std::numbers::pi * i / 40.0;
            const double lam = 2.0 * std::numbers::pi * j / 40.0;
            const Vector t = vec({std::sin(phi) * std::cos(lam), std::sin(phi) * std::sin(lam), std::cos(phi)});
            if ((a.transpose() * t).norm() < eps / 2.0) {
                ++checked;
                CHECK(std::abs(surface.psi_hat(vec({0.1}), ev.family().element(t))) < eps);
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("orthogonal-complement projector")
{
    const Matrix j = vec({1, 1, 0});
    const Matrix m = k_projector(j);
    CHECK((m * vec({1, -1, 2}) - vec({1, -1, 2})).norm() < 1e-14);
    CHECK((m * vec({1, 1, 0})).norm() < 1e-14);
    CHECK(m == m.transpose());
    CHECK(k_projector(Matrix::Zero(3, 2)) == Matrix::Identity(3, 3));

    std::mt19937_64 rng(19);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        Matrix g(5, 2);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            g(i) = z(rng);
        }
        // rank 2 iff some 2x2 minor is nonzero
        double minor = 0.0;
        for (int r1 = 0; r1 < 5; ++r1) {
            for (int r2 = r1 + 1; r2 < 5; ++r2) {
                minor = std::max(minor, std::abs(g(r1, 0) * g(r2, 1) - g(r1, 1) * g(r2, 0)));
            }
        }
        REQUIRE(minor > 1e-8);
        const Matrix mg = k_projector(g);
        CHECK(mg.trace() == doctest::Approx(3.0).epsilon(1e-12));
        CHECK((mg * mg - mg).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((mg - mg.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((mg * g).cwiseAbs().maxCoeff() <= 1e-10);
    }

    Matrix dup(4, 3);
    dup << 1, 2, 3, 0, 1, 1, 2, 0, 2, 1, 1, 2; // third column = first + second
    CHECK(column_basis(dup).cols() == 2);
    CHECK(k_projector(dup).trace() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Hilbert upper bound examples")
{
    const Matrix j = vec({1, 0, 0});
    const std::vector<Matrix> jacobians{j, j};
    CHECK(hilbert_upper_bound({vec({0, 3, 4}), vec({0, 1, 0})}, jacobians) == doctest::Approx(1.0));
    CHECK(hilbert_upper_bound({vec({2, 0, 0}), vec({-7, 0, 0})}, jacobians) < 1e-14);
    CHECK(hilbert_upper_bound({vec({2, 0, 2}), vec({5, 0, 3})}, jacobians) == doctest::Approx(2.0));
}
