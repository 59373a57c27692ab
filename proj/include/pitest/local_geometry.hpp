#pragma once

#include "pitest/cone.hpp"
#include "pitest/parameter_space.hpp"
#include "pitest/test_family.hpp"

#include <functional>
#include <vector>

namespace pitest {

/// Tangent and normal cones of a polyhedral set at one of its points.
struct LocalCones {
    /// {h : a_j'h <= 0 for active j}; offsets are zero.
    Halfspaces tangent;
    /// Nonnegative span of the active normals (no generators when interior).
    FinitelyGeneratedCone normal{Matrix(1, 0)};
    std::vector<int> active;
};

/// Active means a_j'x >= b_j - 1e-8. Throws PreconditionError when the
/// point is not in the set (within 1e-10).
LocalCones tangent_normal_cones(const Halfspaces& set, const Vector& point);
LocalCones tangent_normal_cones(const ParameterSpace& space, const Vector& point);

/// Distance from x to the tangent cone, |proj_N x| by the Moreau decomposition.
double distance_to_tangent(const LocalCones& cones, const Vector& x);

using VectorPath = std::function<Vector(const Vector&)>;

/**
 * inf over the probes of d(G(theta), T_{m(theta)} C) for a polyhedral C.
 * Throws PreconditionError when some m(theta) lies outside C.
 */
double prop2_statistic(const VectorPath& m, const VectorPath& process,
                       const std::vector<Vector>& thetas, const Halfspaces& set);
/// Same, over a grid of the parameter space.
double prop2_statistic(const VectorPath& m, const VectorPath& process, const ParameterSpace& space,
                       int points_per_dim, const Halfspaces& set);

/// Process value, Jacobian and tangent cone S at one parameter probe.
struct LocalProbe {
    Vector process;
    Matrix jacobian;
    FinitelyGeneratedCone tangent;
};

/**
 * inf over probes of inf_{h in S, |h| <= H} sup_t pair(t, W + grad m * h),
 * with H doubled until the inner infimum changes by less than 1e-4
 * relative. Requires a row-independent family.
 */
double u_n_bound(const std::vector<LocalProbe>& probes, const TestFunctionFamily& family);

} // namespace pitest
