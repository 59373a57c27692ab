#pragma once

#include "pitest/types.hpp"

#include <functional>
#include <optional>
#include <span>

namespace pitest {

/// Per-observation moment g(y, theta) = slope * theta + offset.
struct AffineRow {
    Matrix slope;
    Vector offset;
};

/// Order of the linearization remainder f_v of v in theta.
enum class RemainderOrder { zero, quadratic };

/**
 * Per-observation moment function g(Y_i, theta) in R^k of a p-dimensional
 * parameter, with optional analytic Jacobian, affine structure, Lipschitz
 * bound and remainder declaration.
 */
class MomentModel {
public:
    using RowMoment = std::function<Vector(std::span<const double>, const Vector&)>;
    using RowJacobian = std::function<Matrix(std::span<const double>, const Vector&)>;
    using RowAffine = std::function<AffineRow(std::span<const double>)>;

    MomentModel(int k, int p, RowMoment moment);

    /// Model whose moments are affine in theta; the Jacobian is the slope and
    /// the remainder is zero.
    static MomentModel affine(int k, int p, RowAffine rows);

    MomentModel& with_jacobian(RowJacobian jacobian);
    MomentModel& with_lipschitz(double bound);
    /// Declares f_v(delta) = c * delta^2.
    MomentModel& with_curvature(double c);

    int k() const noexcept { return k_; }
    int p() const noexcept { return p_; }

    Vector moment(std::span<const double> row, const Vector& theta) const;

    bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }
    Matrix jacobian(std::span<const double> row, const Vector& theta) const;

    bool is_affine() const noexcept { return static_cast<bool>(affine_); }
    AffineRow affine_row(std::span<const double> row) const;

    std::optional<double> lipschitz() const noexcept { return lipschitz_; }
    RemainderOrder remainder() const noexcept { return remainder_; }
    double curvature() const noexcept { return curvature_; }

private:
    int k_;
    int p_;
    RowMoment moment_;
    RowJacobian jacobian_;
    RowAffine affine_;
    std::optional<double> lipschitz_;
    RemainderOrder remainder_ = RemainderOrder::quadratic;
    double curvature_ = 1.0;
};

} // namespace pitest
