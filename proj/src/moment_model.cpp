#include "pitest/moment_model.hpp"

#include <cmath>

namespace pitest {

MomentModel::MomentModel(int k, int p, RowMoment moment)
    : k_(k), p_(p), moment_(std::move(moment))
{
    if (k < 1 || p < 1) {
        throw ConfigError("moment model needs positive moment and parameter dimensions");
    }
    if (!moment_) {
        throw ConfigError("moment model needs a moment function");
    }
}

MomentModel MomentModel::affine(int k, int p, RowAffine rows)
{
    if (!rows) {
        throw ConfigError("affine moment model needs a row function");
    }
    auto shared = rows;
    MomentModel m(k, p, [shared](std::span<const double> row, const Vector& theta) -> Vector {
        const AffineRow a = shared(row);
        return a.slope * theta + a.offset;
    });
    m.jacobian_ = [shared](std::span<const double> row, const Vector&) -> Matrix {
        return shared(row).slope;
    };
    m.affine_ = std::move(rows);
    m.remainder_ = RemainderOrder::zero;
    m.curvature_ = 0.0;
    return m;
}

MomentModel& MomentModel::with_jacobian(RowJacobian jacobian)
{
    jacobian_ = std::move(jacobian);
    return *this;
}

MomentModel& MomentModel::with_lipschitz(double bound)
{
    if (!(bound >= 0.0) || !std::isfinite(bound)) {
        throw ConfigError("Lipschitz bound must be finite and nonnegative");
    }
    lipschitz_ = bound;
    return *this;
}

MomentModel& MomentModel::with_curvature(double c)
{
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ConfigError("curvature bound must be finite and nonnegative");
    }
    curvature_ = c;
    remainder_ = c == 0.0 ? RemainderOrder::zero : RemainderOrder::quadratic;
    return *this;
}

Vector MomentModel::moment(std::span<const double> row, const Vector& theta) const
{
    Vector g = moment_(row, theta);
    if (g.size() != k_) {
        throw ConfigError("moment function returned " + std::to_string(g.size()) +
                          " values, expected " + std::to_string(k_));
    }
    return g;
}

Matrix MomentModel::jacobian(std::span<const double> row, const Vector& theta) const
{
    if (!jacobian_) {
        throw ConfigError("moment model has no analytic Jacobian");
    }
    Matrix j = jacobian_(row, theta);
    if (j.rows() != k_ || j.cols() != p_) {
        throw ConfigError("Jacobian has the wrong shape");
    }
    return j;
}

AffineRow MomentModel::affine_row(std::span<const double> row) const
{
    if (!affine_) {
        throw ConfigError("moment model is not affine");
    }
    AffineRow a = affine_(row);
    if (a.slope.rows() != k_ || a.slope.cols() != p_ || a.offset.size() != k_) {
        throw ConfigError("affine row has the wrong shape");
    }
    return a;
}

} // namespace pitest
