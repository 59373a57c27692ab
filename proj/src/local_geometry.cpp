#include "pitest/local_geometry.hpp"

#include "pitest/minimax.hpp"
#include "pitest/simplex_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitest {

LocalCones tangent_normal_cones(const Halfspaces& set, const Vector& point)
{
    if (set.normals.cols() != point.size() || set.normals.rows() != set.offsets.size()) {
        throw ConfigError("halfspace description does not match the point dimension");
    }
    const Vector slack = set.normals * point - set.offsets;
    if (slack.size() > 0 && slack.maxCoeff() > 1e-10) {
        throw PreconditionError("point is not a member of the set");
    }
    LocalCones out;
    for (Eigen::Index j = 0; j < slack.size(); ++j) {
        if (slack(j) >= -1e-8) {
            out.active.push_back(static_cast<int>(j));
        }
    }
    const auto k = point.size();
    const auto a = static_cast<Eigen::Index>(out.active.size());
    out.tangent.normals.resize(a, k);
    out.tangent.offsets = Vector::Zero(a);
    Matrix generators(k, a);
    for (Eigen::Index r = 0; r < a; ++r) {
        out.tangent.normals.row(r) = set.normals.row(out.active[r]);
        generators.col(r) = set.normals.row(out.active[r]).transpose();
    }
    out.normal = FinitelyGeneratedCone(std::move(generators));
    return out;
}

LocalCones tangent_normal_cones(const ParameterSpace& space, const Vector& point)
{
    if (space.kind() == ParameterSpace::Kind::ball) {
        if (!space.contains(point)) {
            throw PreconditionError("point is not a member of the set");
        }
        const Vector outward = point - space.center();
        Halfspaces face{Matrix(0, point.size()), Vector(0)};
        if (outward.norm() >= space.radius() - 1e-8) {
            // the supporting halfspace at a boundary point has the same cones
            face.normals = outward.transpose();
            face.offsets = Vector::Constant(1, outward.dot(point));
        }
        return tangent_normal_cones(face, point);
    }
    return tangent_normal_cones(space.halfspaces(), point);
}

double distance_to_tangent(const LocalCones& cones, const Vector& x)
{
    if (cones.active.empty()) {
        return 0.0;
    }
    return project_cone(x, cones.normal).point.norm();
}

double prop2_statistic(const VectorPath& m, const VectorPath& process,
                       const std::vector<Vector>& thetas, const Halfspaces& set)
{
    if (thetas.empty()) {
        throw ConfigError("no parameter probes supplied");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& theta : thetas) {
        const Vector mt = m(theta);
        const Vector slack = set.normals * mt - set.offsets;
        if (slack.size() > 0 && slack.maxCoeff() > 1e-10) {
            throw PreconditionError("null configuration violated: m(theta) lies outside the set");
        }
        best = std::min(best, distance_to_tangent(tangent_normal_cones(set, mt), process(theta)));
    }
    return best;
}

double prop2_statistic(const VectorPath& m, const VectorPath& process, const ParameterSpace& space,
                       int points_per_dim, const Halfspaces& set)
{
    return prop2_statistic(m, process, grid_over_space(space, points_per_dim), set);
}

namespace {

// proj onto S intersected with the radius-H ball: project onto the cone, then scale
Vector project_truncated(const Vector& h, const FinitelyGeneratedCone& cone, double radius)
{
    Vector y = project_cone(h, cone).point;
    const double r = y.norm();
    if (r > radius) {
        y *= radius / r;
    }
    return y;
}

double truncated_inf(const LocalProbe& probe, const TestFunctionFamily& family, double radius)
{
    const int p = static_cast<int>(probe.jacobian.cols());
    const Objective f = [&](const Vector& h) {
        return family_sup(family, probe.process + probe.jacobian * h).value;
    };
    const Projector project = [&](const Vector& h) { return project_truncated(h, probe.tangent, radius); };

    // coarse scan, then simplex refinement from the best few cells
    const int per_dim = p == 1 ? 41 : (p == 2 ? 15 : 5);
    std::vector<std::pair<double, Vector>> scanned;
    std::vector<int> counter(p, 0);
    Vector h(p);
    while (true) {
        for (int i = 0; i < p; ++i) {
            h(i) = -radius + 2.0 * radius * counter[i] / (per_dim - 1);
        }
        const Vector x = project(h);
        scanned.emplace_back(f(x), x);
        int i = 0;
        while (i < p && ++counter[i] == per_dim) {
            counter[i] = 0;
            ++i;
        }
        if (i == p) {
            break;
        }
    }
    std::sort(scanned.begin(), scanned.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SimplexOptions options;
    options.initial_step = 0.25 * radius;
    options.value_tol = 1e-13;
    options.point_tol = 1e-12 * radius;
    options.max_evaluations = 20000;
    double best = scanned.front().first;
    const std::size_t starts = std::min<std::size_t>(3, scanned.size());
    for (std::size_t s = 0; s < starts; ++s) {
        best = std::min(best, projected_simplex_descent(f, project, scanned[s].second, options).value);
    }
    return best;
}

} // namespace

double u_n_bound(const std::vector<LocalProbe>& probes, const TestFunctionFamily& family)
{
    if (!family.row_independent()) {
        throw ConfigError("u_n_bound needs a row-independent family");
    }
    if (probes.empty()) {
        throw ConfigError("no parameter probes supplied");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& probe : probes) {
        if (probe.jacobian.rows() != probe.process.size() || probe.jacobian.cols() != probe.tangent.dim()) {
            throw ConfigError("probe dimensions do not agree");
        }
        const bool trivial = probe.tangent.count() == 0 || probe.tangent.generators().isZero(0.0) ||
                             probe.jacobian.isZero(0.0);
        double value = family_sup(family, probe.process).value;
        if (!trivial) {
            double radius = std::max(1.0, probe.process.norm());
            value = truncated_inf(probe, family, radius);
            for (int doubling = 0; doubling < 60; ++doubling) {
                radius *= 2.0;
                const double next = std::min(value, truncated_inf(probe, family, radius));
                const bool stable = std::abs(value - next) <= 1e-4 * std::abs(next) + 1e-12;
                value = next;
                if (stable) {
                    break;
                }
            }
        }
        best = std::min(best, value);
    }
    return best;
}

} // namespace pitest
