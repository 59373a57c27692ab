#include "pitest/parameter_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace pitest {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finalizer over a mix of both inputs
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void require_finite(const Vector& x, const char* what)
{
    if (!x.allFinite()) {
        throw ConfigError(std::string(what) + " must be finite");
    }
}

// Dykstra's alternating projections onto the intersection of halfspaces.
Vector dykstra_halfspaces(const Matrix& normals, const Vector& offsets, const Vector& x,
                          int max_sweeps = 20000, double tol = 1e-13)
{
    const auto m = normals.rows();
    Vector y = x;
    Matrix corrections = Matrix::Zero(normals.cols(), m);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const Vector z = y + corrections.col(j);
            const auto a = normals.row(j).transpose();
            const double excess = a.dot(z) - offsets(j);
            Vector next = z;
            if (excess > 0.0) {
                next -= (excess / a.squaredNorm()) * a;
            }
            corrections.col(j) = z - next;
            change = std::max(change, (next - y).cwiseAbs().maxCoeff());
            y = std::move(next);
        }
        if (change < tol * (1.0 + y.cwiseAbs().maxCoeff())) {
            break;
        }
    }
    return y;
}

std::vector<Vector> enumerate_vertices(const Matrix& normals, const Vector& offsets)
{
    const int m = static_cast<int>(normals.rows());
    const int p = static_cast<int>(normals.cols());
    if (m < p + 1) {
        throw ConfigError("polytope needs at least p+1 halfspaces to be bounded");
    }
    double combos = 1.0;
    for (int i = 0; i < p; ++i) {
        combos *= static_cast<double>(m - i) / static_cast<double>(i + 1);
    }
    if (combos > 2e6) {
        throw ConfigError("polytope too large for vertex enumeration");
    }

    std::vector<Vector> out;
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    const double scale = 1.0 + offsets.cwiseAbs().maxCoeff();
    while (true) {
        Matrix a(p, p);
        Vector b(p);
        for (int i = 0; i < p; ++i) {
            a.row(i) = normals.row(idx[i]);
            b(i) = offsets(idx[i]);
        }
        Eigen::FullPivLU<Matrix> lu(a);
        if (lu.isInvertible()) {
            Vector v = lu.solve(b);
            if (((normals * v - offsets).array() <= 1e-9 * scale).all()) {
                const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Vector& w) {
                    return (w - v).cwiseAbs().maxCoeff() <= 1e-9 * scale;
                });
                if (!duplicate) {
                    out.push_back(std::move(v));
                }
            }
        }
        int i = p - 1;
        while (i >= 0 && idx[i] == m - p + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[i];
        for (int j = i + 1; j < p; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

} // namespace

ParameterSpace ParameterSpace::box(Vector lower, Vector upper)
{
    if (lower.size() == 0 || lower.size() != upper.size()) {
        throw ConfigError("box bounds must be nonempty and of equal length");
    }
    require_finite(lower, "box lower bound");
    require_finite(upper, "box upper bound");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (lower(i) > upper(i)) {
            std::ostringstream os;
            os << "box lower bound exceeds upper bound at coordinate " << i;
            throw ConfigError(os.str());
        }
    }
    ParameterSpace s;
    s.kind_ = Kind::box;
    s.center_ = 0.5 * (lower + upper);
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

ParameterSpace ParameterSpace::ball(Vector center, double radius)
{
    if (center.size() == 0) {
        throw ConfigError("ball center must be nonempty");
    }
    require_finite(center, "ball center");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ConfigError("ball radius must be positive and finite");
    }
    ParameterSpace s;
    s.kind_ = Kind::ball;
    s.lower_ = center.array() - radius;
    s.upper_ = center.array() + radius;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

ParameterSpace ParameterSpace::polytope(Matrix normals, Vector offsets)
{
    if (normals.rows() != offsets.size() || normals.cols() == 0) {
        throw ConfigError("polytope normals/offsets shape mismatch");
    }
    if (!normals.allFinite() || !offsets.allFinite()) {
        throw ConfigError("polytope description must be finite");
    }
    for (Eigen::Index j = 0; j < normals.rows(); ++j) {
        if (normals.row(j).norm() == 0.0) {
            throw ConfigError("polytope has a zero halfspace normal");
        }
    }
    auto vertices = enumerate_vertices(normals, offsets);
    if (vertices.empty()) {
        throw ConfigError("infeasible polytope: no member point found");
    }
    const auto p = normals.cols();
    ParameterSpace s;
    s.kind_ = Kind::polytope;
    s.lower_ = Vector::Constant(p, std::numeric_limits<double>::infinity());
    s.upper_ = -s.lower_;
    s.center_ = Vector::Zero(p);
    for (const auto& v : vertices) {
        s.lower_ = s.lower_.cwiseMin(v);
        s.upper_ = s.upper_.cwiseMax(v);
        s.center_ += v;
    }
    s.center_ /= static_cast<double>(vertices.size());
    s.normals_ = std::move(normals);
    s.offsets_ = std::move(offsets);
    s.vertices_ = std::move(vertices);
    return s;
}

bool ParameterSpace::contains(const Vector& x, double tol) const
{
    if (x.size() != dim() || !x.allFinite()) {
        return false;
    }
    switch (kind_) {
    case Kind::box:
        return ((x - lower_).array() >= -tol).all() && ((upper_ - x).array() >= -tol).all();
    case Kind::ball:
        return (x - center_).norm() <= radius_ + tol;
    case Kind::polytope:
        return ((normals_ * x - offsets_).array() <= tol).all();
    }
    return false;
}

Vector ParameterSpace::project(const Vector& x) const
{
    if (x.size() != dim()) {
        throw ConfigError("point dimension does not match parameter space");
    }
    if (!x.allFinite()) {
        throw ConfigError("cannot project a non-finite point");
    }
    switch (kind_) {
    case Kind::box:
        return x.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::ball: {
        const Vector d = x - center_;
        const double r = d.norm();
        if (r <= radius_) {
            return x;
        }
        // shrink until the rounded result is a member, so projection is idempotent
        double scale = radius_ / r;
        Vector y = center_ + scale * d;
        while ((y - center_).norm() > radius_) {
            scale = std::nextafter(scale, 0.0);
            y = center_ + scale * d;
        }
        return y;
    }
    case Kind::polytope: {
        if (contains(x, 0.0)) {
            return x;
        }
        Vector y = dykstra_halfspaces(normals_, offsets_, x);
        // clip the residual infeasibility left by the finite sweep count
        if (!contains(y, 1e-10)) {
            throw NumericalError("polytope projection did not reach feasibility", y);
        }
        return y;
    }
    }
    return x;
}

Halfspaces ParameterSpace::halfspaces() const
{
    switch (kind_) {
    case Kind::box: {
        const auto p = dim();
        Halfspaces h{Matrix::Zero(2 * p, p), Vector::Zero(2 * p)};
        for (int i = 0; i < p; ++i) {
            h.normals(2 * i, i) = -1.0;
            h.offsets(2 * i) = -lower_(i);
            h.normals(2 * i + 1, i) = 1.0;
            h.offsets(2 * i + 1) = upper_(i);
        }
        return h;
    }
    case Kind::polytope:
        return {normals_, offsets_};
    case Kind::ball:
        break;
    }
    throw ConfigError("a ball has no finite halfspace description");
}

const std::vector<Vector>& ParameterSpace::vertices() const
{
    if (kind_ == Kind::ball) {
        throw ConfigError("a ball has no vertices");
    }
    if (kind_ == Kind::box && vertices_.empty()) {
        if (dim() > 16) {
            throw ConfigError("box dimension too large for vertex enumeration");
        }
        auto& cache = const_cast<std::vector<Vector>&>(vertices_);
        const std::size_t count = std::size_t{1} << dim();
        for (std::size_t mask = 0; mask < count; ++mask) {
            Vector v(dim());
            for (int i = 0; i < dim(); ++i) {
                v(i) = (mask >> i) & 1U ? upper_(i) : lower_(i);
            }
            cache.push_back(std::move(v));
        }
    }
    return vertices_;
}

Vector project_onto_space(const ParameterSpace& space, const Vector& x)
{
    return space.project(x);
}

std::vector<Vector> sample_space(const ParameterSpace& space, std::uint64_t seed,
                                 std::size_t count)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int p = space.dim();
    std::vector<Vector> out;
    out.reserve(count);

    auto in_box = [&] {
        Vector v(p);
        for (int i = 0; i < p; ++i) {
            v(i) = space.lower()(i) + unif(rng) * (space.upper()(i) - space.lower()(i));
        }
        return v;
    };

    for (std::size_t c = 0; c < count; ++c) {
        switch (space.kind()) {
        case ParameterSpace::Kind::box:
            out.push_back(in_box());
            break;
        case ParameterSpace::Kind::ball: {
            Vector dir(p);
            for (int i = 0; i < p; ++i) {
                dir(i) = normal(rng);
            }
            const double nrm = dir.norm();
            if (nrm == 0.0) {
                out.push_back(space.center());
                break;
            }
            const double r = space.radius() * std::pow(unif(rng), 1.0 / p);
            out.push_back(space.center() + (r / nrm) * dir);
            break;
        }
        case ParameterSpace::Kind::polytope: {
            Vector v;
            bool found = false;
            for (int attempt = 0; attempt < 100000 && !found; ++attempt) {
                v = in_box();
                found = space.contains(v, 0.0);
            }
            out.push_back(found ? v : space.center());
            break;
        }
        }
    }
    return out;
}

std::vector<Vector> grid_over_space(const ParameterSpace& space, int points_per_dim)
{
    const int p = space.dim();
    const int g = std::max(points_per_dim, 2);
    std::vector<Vector> out;
    std::vector<int> counter(p, 0);
    while (true) {
        Vector v(p);
        for (int i = 0; i < p; ++i) {
            const double s = static_cast<double>(counter[i]) / (g - 1);
            v(i) = space.lower()(i) + s * (space.upper()(i) - space.lower()(i));
        }
        if (space.contains(v, 1e-12)) {
            out.push_back(std::move(v));
        }
        int i = 0;
        while (i < p && ++counter[i] == g) {
            counter[i] = 0;
            ++i;
        }
        if (i == p) {
            break;
        }
    }
    return out;
}

} // namespace pitest
