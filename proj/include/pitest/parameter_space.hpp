#pragma once

#include "pitest/types.hpp"

#include <utility>
#include <vector>

namespace pitest {

/// Halfspace description {x : normals * x <= offsets}.
struct Halfspaces {
    Matrix normals;
    Vector offsets;
};

/**
 * Compact convex parameter space: a box, a Euclidean ball, or a bounded
 * polytope given by halfspaces.
 */
class ParameterSpace {
public:
    enum class Kind { box, ball, polytope };

    static ParameterSpace box(Vector lower, Vector upper);
    static ParameterSpace ball(Vector center, double radius);
    /// The polytope must be bounded; emptiness is detected and rejected.
    static ParameterSpace polytope(Matrix normals, Vector offsets);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return static_cast<int>(lower_.size()); }

    bool contains(const Vector& x, double tol = 1e-10) const;
    Vector project(const Vector& x) const;

    /// Axis-aligned box containing the space.
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }

    const Vector& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    /// Halfspace form; box and polytope only.
    Halfspaces halfspaces() const;

    /// Vertices of a box or polytope (enumerated; desk-scale only).
    const std::vector<Vector>& vertices() const;

private:
    ParameterSpace() = default;

    Kind kind_ = Kind::box;
    Vector lower_, upper_;
    Vector center_;
    double radius_ = 0.0;
    Matrix normals_;
    Vector offsets_;
    std::vector<Vector> vertices_;
};

Vector project_onto_space(const ParameterSpace& space, const Vector& x);

/// Deterministic sample of member points (uniform for box and ball,
/// rejection inside the bounding box for polytopes).
std::vector<Vector> sample_space(const ParameterSpace& space, std::uint64_t seed,
                                 std::size_t count);

/// Regular grid over the bounding box, restricted to members.
std::vector<Vector> grid_over_space(const ParameterSpace& space, int points_per_dim);

} // namespace pitest
