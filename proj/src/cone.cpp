#include "pitest/cone.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pitest {

FinitelyGeneratedCone::FinitelyGeneratedCone(Matrix generators)
    : generators_(std::move(generators))
{
    if (generators_.rows() < 1) {
        throw ConfigError("cone dimension must be at least 1");
    }
    if (generators_.cols() > max_cone_generators) {
        throw ConfigError("cone has more than 64 generators");
    }
    if (!generators_.allFinite()) {
        throw ConfigError("cone generators must be finite");
    }
}

FinitelyGeneratedCone FinitelyGeneratedCone::from_rows(const Matrix& rows)
{
    return FinitelyGeneratedCone(rows.transpose());
}

FinitelyGeneratedCone FinitelyGeneratedCone::nonnegative_orthant(int k)
{
    return FinitelyGeneratedCone(Matrix::Identity(k, k));
}

FinitelyGeneratedCone FinitelyGeneratedCone::nonpositive_orthant(int k)
{
    return FinitelyGeneratedCone(-Matrix::Identity(k, k));
}

FinitelyGeneratedCone FinitelyGeneratedCone::subspace(const Matrix& basis)
{
    Matrix g(basis.rows(), 2 * basis.cols());
    g << basis, -basis;
    return FinitelyGeneratedCone(std::move(g));
}

bool FinitelyGeneratedCone::contains(const Vector& x, double tol) const
{
    return distance_primal(x, *this) <= tol * (1.0 + x.norm());
}

PolarCone::PolarCone(const FinitelyGeneratedCone& cone)
    : dim_(cone.dim())
{
    // zero generators impose no constraint
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < cone.generators().cols(); ++j) {
        if (cone.generators().col(j).squaredNorm() > 0.0) {
            keep.push_back(j);
        }
    }
    normals_.resize(static_cast<Eigen::Index>(keep.size()), dim_);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        normals_.row(static_cast<Eigen::Index>(r)) = cone.generators().col(keep[r]).transpose();
    }
}

bool PolarCone::contains(const Vector& y, double tol) const
{
    if (normals_.rows() == 0) {
        return true;
    }
    return ((normals_ * y).array() <= tol).all();
}

namespace {

// Projection onto {y : a_j'y <= 0} by a primal active-set method started at
// the feasible point 0. Working-set rows stay linearly independent because a
// constraint only enters when the step direction, which lies in the null
// space of the working rows, increases its value.
Vector polar_projection(const Matrix& normals, const Vector& z)
{
    const auto m = normals.rows();
    const auto k = z.size();
    if (m == 0) {
        return z;
    }
    Matrix a = normals;
    for (Eigen::Index j = 0; j < m; ++j) {
        a.row(j).normalize();
    }
    const double tol = 1e-14 * (1.0 + z.norm());
    Vector y = Vector::Zero(k);
    std::vector<Eigen::Index> working;
    const int cap = 50 * static_cast<int>(m) + 10;
    for (int it = 0; it < cap; ++it) {
        Matrix aw(static_cast<Eigen::Index>(working.size()), k);
        for (std::size_t r = 0; r < working.size(); ++r) {
            aw.row(static_cast<Eigen::Index>(r)) = a.row(working[r]);
        }
        const Vector g = z - y;
        Vector step = g;
        if (!working.empty()) {
            const Eigen::HouseholderQR<Matrix> qr(aw.transpose());
            const Matrix q = qr.householderQ() * Matrix::Identity(k, aw.rows());
            step -= q * (q.transpose() * g);
        }
        if (step.norm() <= tol) {
            if (working.empty()) {
                break;
            }
            // multipliers from aw' mu = z - y
            const Vector mu = aw.transpose().colPivHouseholderQr().solve(g);
            Eigen::Index worst = -1;
            double lowest = -1e-12;
            for (Eigen::Index r = 0; r < mu.size(); ++r) {
                if (mu(r) < lowest) {
                    lowest = mu(r);
                    worst = r;
                }
            }
            if (worst < 0) {
                break;
            }
            working.erase(working.begin() + worst);
            continue;
        }
        double alpha = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (std::find(working.begin(), working.end(), j) != working.end()) {
                continue;
            }
            const double rate = a.row(j).dot(step);
            if (rate > 1e-15) {
                const double limit = std::max(0.0, -a.row(j).dot(y)) / rate;
                if (limit < alpha) {
                    alpha = limit;
                    blocking = j;
                }
            }
        }
        y += alpha * step;
        if (blocking >= 0) {
            working.push_back(blocking);
        }
    }
    return y;
}

} // namespace

Vector PolarCone::project(const Vector& y) const
{
    if (contains(y, 0.0)) {
        return y;
    }
    return polar_projection(normals_, y);
}

Vector PolarCone::project_unit_ball(const Vector& y) const
{
    // for a cone, projecting and then scaling into the ball is exact
    const Vector p = contains(y, 0.0) ? y : polar_projection(normals_, y);
    const double r = p.norm();
    return r > 1.0 ? Vector(p / r) : p;
}

ConeProjection project_cone(const Vector& x, const FinitelyGeneratedCone& cone)
{
    if (x.size() != cone.dim()) {
        throw ConfigError("point dimension does not match cone dimension");
    }
    if (!x.allFinite()) {
        throw ConfigError("cannot project a non-finite point");
    }
    const Matrix& v = cone.generators();
    const int m = cone.count();
    ConeProjection out{Vector::Zero(x.size()), Vector::Zero(m), 0};
    if (m == 0 || x.squaredNorm() == 0.0) {
        return out;
    }

    const double scale = (v.colwise().norm().maxCoeff() + 1.0) * (x.norm() + 1.0);
    const double tol = 1e-12 * scale;
    const int cap = 50 * m;

    Vector lambda = Vector::Zero(m);
    std::vector<char> passive(m, 0);
    std::vector<char> blocked(m, 0);
    int iterations = 0;

    auto solve_passive = [&](Vector& s) {
        std::vector<Eigen::Index> idx;
        for (int j = 0; j < m; ++j) {
            if (passive[j]) {
                idx.push_back(j);
            }
        }
        Matrix vp(v.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) {
            vp.col(static_cast<Eigen::Index>(c)) = v.col(idx[c]);
        }
        const Vector sp = vp.completeOrthogonalDecomposition().solve(x);
        s = Vector::Zero(m);
        for (std::size_t c = 0; c < idx.size(); ++c) {
            s(idx[c]) = sp(static_cast<Eigen::Index>(c));
        }
    };

    while (true) {
        const Vector w = v.transpose() * (x - v * lambda);
        int enter = -1;
        double best = tol;
        for (int j = 0; j < m; ++j) {
            if (!passive[j] && !blocked[j] && w(j) > best) {
                best = w(j);
                enter = j;
            }
        }
        if (enter < 0) {
            break;
        }
        if (++iterations > cap) {
            throw NumericalError("cone projection exceeded its iteration cap", v * lambda);
        }
        passive[enter] = 1;

        Vector s;
        solve_passive(s);
        if (s(enter) <= 0.0) {
            // numerically useless column; skip it until the iterate changes
            passive[enter] = 0;
            blocked[enter] = 1;
            continue;
        }
        std::fill(blocked.begin(), blocked.end(), 0);

        while (true) {
            bool feasible = true;
            for (int j = 0; j < m; ++j) {
                if (passive[j] && s(j) <= 0.0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                lambda = s;
                break;
            }
            if (++iterations > cap) {
                throw NumericalError("cone projection exceeded its iteration cap", v * lambda);
            }
            double alpha = 1.0;
            for (int j = 0; j < m; ++j) {
                if (passive[j] && s(j) <= 0.0) {
                    alpha = std::min(alpha, lambda(j) / (lambda(j) - s(j)));
                }
            }
            lambda += alpha * (s - lambda);
            for (int j = 0; j < m; ++j) {
                if (passive[j] && lambda(j) <= 1e-14 * scale) {
                    passive[j] = 0;
                    lambda(j) = 0.0;
                }
            }
            solve_passive(s);
        }
    }

    out.coefficients = lambda.cwiseMax(0.0);
    out.point = v * out.coefficients;
    out.iterations = iterations;
    return out;
}

double distance_primal(const Vector& x, const FinitelyGeneratedCone& cone)
{
    return (x - project_cone(x, cone).point).norm();
}

DualDistance distance_dual(const Vector& x, const FinitelyGeneratedCone& cone)
{
    if (x.size() != cone.dim()) {
        throw ConfigError("point dimension does not match cone dimension");
    }
    DualDistance out{0.0, Vector::Zero(x.size())};
    const double xnorm = x.norm();
    if (xnorm == 0.0 || !std::isfinite(xnorm)) {
        return out;
    }
    const PolarCone polar(cone);
    constexpr int iterations = 200;
    const double step0 = 10.0 / xnorm;
    Vector y = Vector::Zero(x.size());
    for (int it = 0; it < iterations; ++it) {
        const double step = step0 / std::sqrt(static_cast<double>(it) + 1.0);
        y = polar.project_unit_ball(y + step * x);
        // the pairing is homogeneous on the cone: push ascending points to the sphere
        const double r = y.norm();
        if (r > 0.0 && r < 1.0 && x.dot(y) > 0.0) {
            y /= r;
        }
        const double value = x.dot(y);
        if (value > out.value) {
            out.value = value;
            out.maximizer = y;
        }
    }
    return out;
}

} // namespace pitest
