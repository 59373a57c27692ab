#include "doctest.h"
#include "fixtures.hpp"

#include "pitest/cone.hpp"

#include <cmath>
#include <random>

using namespace pitest;
using fixtures::vec;

namespace {

// Projection by enumerating generator subsets: least squares on each face,
// kept when the coefficients are nonnegative; the closest feasible point wins.
Vector face_enumeration(const Vector& x, const Matrix& v)
{
    const int m = static_cast<int>(v.cols());
    Vector best = Vector::Zero(x.size());
    double best_dist = x.norm();
    for (int mask = 1; mask < (1 << m); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < m; ++j) {
            if (mask & (1 << j)) {
                cols.push_back(j);
            }
        }
        Matrix sub(x.size(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            sub.col(static_cast<Eigen::Index>(j)) = v.col(cols[j]);
        }
        const Vector c = sub.completeOrthogonalDecomposition().solve(x);
        if ((c.array() < -1e-12).any()) {
            continue;
        }
        const Vector point = sub * c;
        if ((x - point).norm() < best_dist) {
            best_dist = (x - point).norm();
            best = point;
        }
    }
    return best;
}

Matrix random_generators(std::mt19937_64& rng, int k, int m)
{
    std::normal_distribution<double> z;
    Matrix v(k, m);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = z(rng);
    }
    return v;
}

Vector random_point(std::mt19937_64& rng, int k)
{
    std::normal_distribution<double> z;
    Vector x(k);
    for (int i = 0; i < k; ++i) {
        x(i) = z(rng);
    }
    return x;
}

} // namespace

TEST_CASE("orthant projection and distances")
{
    const auto c = FinitelyGeneratedCone::nonnegative_orthant(2);
    const Vector x = vec({1, -2});
    CHECK((project_cone(x, c).point - vec({1, 0})).norm() < 1e-14);
    CHECK(distance_primal(x, c) == doctest::Approx(2.0));
    const auto dual = distance_dual(x, c);
    CHECK(dual.value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK((dual.maximizer - vec({0, -1})).norm() < 1e-6);
    CHECK(distance_primal(vec({1, 1}), c) < 1e-14);
    CHECK(distance_dual(vec({1, 1}), c).value < 1e-12);
}

TEST_CASE("members project to themselves")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix v = random_generators(rng, 3, 4);
        const FinitelyGeneratedCone c(v);
        const Vector weights = random_point(rng, 4).cwiseAbs();
        const Vector x = v * weights;
        CHECK((project_cone(x, c).point - x).norm() <= 1e-10 * (1 + x.norm()));
        CHECK(c.contains(x));
        CHECK(c.contains(2.0 * x));
        CHECK(c.contains(Vector::Zero(3)));
    }
}

TEST_CASE("two-generator cone example")
{
    const FinitelyGeneratedCone c = FinitelyGeneratedCone::from_rows((Matrix(2, 2) << 1, 0, 1, 1).finished());
    const Vector x = vec({0, 1});
    const Vector oracle = face_enumeration(x, c.generators());
    CHECK((oracle - vec({0.5, 0.5})).norm() < 1e-12);
    CHECK((project_cone(x, c).point - vec({0.5, 0.5})).norm() < 1e-12);
}

TEST_CASE("projection agrees with face enumeration")
{
    std::mt19937_64 rng(11);
    for (int k = 2; k <= 4; ++k) {
        for (int trial = 0; trial < 60; ++trial) {
            const int m = 1 + static_cast<int>(rng() % 6);
            const Matrix v = random_generators(rng, k, m);
            const Vector x = random_point(rng, k);
            const ConeProjection proj = project_cone(x, FinitelyGeneratedCone(v));
            const Vector oracle = face_enumeration(x, v);
            CHECK((x - proj.point).norm() == doctest::Approx((x - oracle).norm()).epsilon(1e-9));
            CHECK((proj.coefficients.array() >= 0.0).all());
            CHECK((v * proj.coefficients - proj.point).norm() < 1e-10);
        }
    }
}

TEST_CASE("projection residual lies in the polar and is orthogonal")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 8);
        const Matrix v = random_generators(rng, k, m);
        const Vector x = 3.0 * random_point(rng, k);
        const Vector p = project_cone(x, FinitelyGeneratedCone(v)).point;
        const Vector r = x - p;
        CHECK(r.dot(p) <= 1e-8 * x.squaredNorm());
        CHECK((v.transpose() * r).maxCoeff() <= 1e-8);
    }
}

TEST_CASE("distance is positively homogeneous")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 4);
        const FinitelyGeneratedCone c(random_generators(rng, k, 3));
        const Vector x = random_point(rng, k);
        const double alpha = 0.1 + 5.0 * std::uniform_real_distribution<double>()(rng);
        CHECK(std::abs(distance_primal(alpha * x, c) - alpha * distance_primal(x, c)) < 1e-8);
    }
}

TEST_CASE("polar cone membership and projection")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix v = random_generators(rng, 3, 3);
        const FinitelyGeneratedCone c(v);
        const PolarCone polar(c);
        const Vector y = polar.project_unit_ball(random_point(rng, 3));
        CHECK(polar.contains(y));
        CHECK(y.norm() <= 1.0 + 1e-12);
        CHECK((v.transpose() * y).maxCoeff() <= 1e-10);
    }
}

TEST_CASE("dual distance matches a direction grid in three dimensions")
{
    // Three independent generators give a simplicial polar whose extreme rays
    // are the columns of -V^{-T}; normalized barycentric combinations of those
    // rays cover the polar directions, edges included.
    const int steps = 140;
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix v = random_generators(rng, 3, 3);
        const FinitelyGeneratedCone c(v);
        const Matrix rays = -v.transpose().inverse();
        Vector x = random_point(rng, 3);
        x /= x.norm();
        double grid = 0.0;
        int count = 0;
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; i + j <= steps; ++j) {
                const Vector y = i * rays.col(0) + j * rays.col(1) + (steps - i - j) * rays.col(2);
                grid = std::max(grid, x.dot(y) / y.norm());
                ++count;
            }
        }
        CHECK(count >= 10000);
        const double dual = distance_dual(x, c).value;
        CHECK(std::abs(dual - grid) <= 1e-3);
    }
}

TEST_CASE("primal and dual distances agree")
{
    std::mt19937_64 rng(37);
    for (int k = 2; k <= 5; ++k) {
        for (int trial = 0; trial < 50; ++trial) {
            const int m = 1 + static_cast<int>(rng() % 7);
            const FinitelyGeneratedCone c(random_generators(rng, k, m));
            const Vector x = 2.0 * random_point(rng, k);
            CHECK(std::abs(distance_primal(x, c) - distance_dual(x, c).value) <= 1e-6 * (1 + x.norm()));
        }
    }
}

TEST_CASE("subspace cones and generator limits")
{
    const auto line = FinitelyGeneratedCone::subspace(vec({1, 1}));
    CHECK(distance_primal(vec({1, -1}), line) == doctest::Approx(std::sqrt(2.0)));
    CHECK(distance_primal(vec({-3, -3}), line) < 1e-12);
    const auto neg = FinitelyGeneratedCone::nonpositive_orthant(2);
    CHECK(distance_primal(vec({1, -2}), neg) == doctest::Approx(1.0));
    CHECK_THROWS_AS(FinitelyGeneratedCone(Matrix::Ones(2, 65)), ConfigError);
    CHECK_NOTHROW(FinitelyGeneratedCone(Matrix::Ones(2, 64)));
}
