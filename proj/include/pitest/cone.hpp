#pragma once

#include "pitest/types.hpp"

namespace pitest {

inline constexpr int max_cone_generators = 64;

/// Cone {V * c : c >= 0} spanned by the columns of V (k x m, m <= 64).
class FinitelyGeneratedCone {
public:
    explicit FinitelyGeneratedCone(Matrix generators);

    /// One generator per row.
    static FinitelyGeneratedCone from_rows(const Matrix& rows);
    static FinitelyGeneratedCone nonnegative_orthant(int k);
    static FinitelyGeneratedCone nonpositive_orthant(int k);
    /// Linear subspace spanned by the columns of `basis` (generators +-basis).
    static FinitelyGeneratedCone subspace(const Matrix& basis);

    int dim() const noexcept { return static_cast<int>(generators_.rows()); }
    int count() const noexcept { return static_cast<int>(generators_.cols()); }
    const Matrix& generators() const noexcept { return generators_; }

    /// Membership up to tol * (1 + |x|) in projection distance.
    bool contains(const Vector& x, double tol = 1e-8) const;

private:
    Matrix generators_;
};

/// Polar of a finitely generated cone in halfspace form: {y : v_j' y <= 0}.
class PolarCone {
public:
    explicit PolarCone(const FinitelyGeneratedCone& cone);

    int dim() const noexcept { return dim_; }
    const Matrix& normals() const noexcept { return normals_; }
    bool contains(const Vector& y, double tol = 1e-10) const;

    /// Euclidean projection by a primal active-set method over the halfspaces.
    Vector project(const Vector& y) const;
    /// Projection onto the polar intersected with the closed unit ball.
    Vector project_unit_ball(const Vector& y) const;

private:
    Matrix normals_;
    int dim_;
};

struct ConeProjection {
    Vector point;
    Vector coefficients; ///< nonnegative generator weights
    int iterations = 0;
};

/**
 * Euclidean projection onto the cone by Lawson-Hanson active-set
 * nonnegative least squares on the generator coefficients.
 *
 * Throws NumericalError (carrying the best point) after 50 * m iterations.
 */
ConeProjection project_cone(const Vector& x, const FinitelyGeneratedCone& cone);

/// |x - proj_C(x)|.
double distance_primal(const Vector& x, const FinitelyGeneratedCone& cone);

struct DualDistance {
    double value = 0.0;
    Vector maximizer;
};

/// sup of <x, y> over the polar cone intersected with the unit ball, by
/// projected supergradient ascent. Independent of project_cone.
DualDistance distance_dual(const Vector& x, const FinitelyGeneratedCone& cone);

} // namespace pitest
