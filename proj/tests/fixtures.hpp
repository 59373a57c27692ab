#pragma once

#include "pitest/empirical_process.hpp"

#include <random>

namespace fixtures {

using pitest::Matrix;
using pitest::RowMatrix;
using pitest::Vector;

inline pitest::Dataset dataset(RowMatrix rows)
{
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        names.push_back("c" + std::to_string(j));
    }
    return pitest::Dataset(std::move(rows), std::move(names));
}

/// g_i(theta) = A_i theta - b_i with A_i (k x p) and b_i stored row-major
/// in the data row as [A_i entries, b_i].
inline pitest::MomentModel bilinear_model(int k, int p)
{
    return pitest::MomentModel::affine(k, p, [k, p](std::span<const double> row) {
        pitest::AffineRow r{Matrix(k, p), Vector(k)};
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < p; ++j) {
                r.slope(i, j) = row[static_cast<std::size_t>(i * p + j)];
            }
            r.offset(i) = -row[static_cast<std::size_t>(k * p + i)];
        }
        return r;
    });
}

/// Same moment written as a general (non-affine) model with analytic Jacobian.
inline pitest::MomentModel bilinear_general(int k, int p)
{
    auto slope = [k, p](std::span<const double> row) {
        Matrix a(k, p);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < p; ++j) {
                a(i, j) = row[static_cast<std::size_t>(i * p + j)];
            }
        }
        return a;
    };
    pitest::MomentModel m(k, p, [k, p, slope](std::span<const double> row, const Vector& theta) {
        Vector b(k);
        for (int i = 0; i < k; ++i) {
            b(i) = row[static_cast<std::size_t>(k * p + i)];
        }
        return Vector(slope(row) * theta - b);
    });
    m.with_jacobian([slope](std::span<const double> row, const Vector&) { return slope(row); });
    return m;
}

/// Rows with A_i = A + noise * N(0,1) entries and b_i = A_i theta0 - e_i,
/// where e_i is noise centered exactly to mean zero when `exact` is set.
inline pitest::Dataset bilinear_data(const Matrix& a, const Vector& theta0, std::size_t n, double noise,
                                     std::uint64_t seed, bool exact = false, double error_sd = 1.0)
{
    const auto k = a.rows();
    const auto p = a.cols();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    RowMatrix rows(static_cast<Eigen::Index>(n), k * p + k);
    Matrix errors(static_cast<Eigen::Index>(n), k);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            errors(i, j) = error_sd * z(rng);
        }
    }
    if (exact) {
        errors.rowwise() -= errors.colwise().mean();
    }
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        Matrix ai = a;
        for (Eigen::Index r = 0; r < k; ++r) {
            for (Eigen::Index c = 0; c < p; ++c) {
                ai(r, c) += noise * z(rng);
                rows(i, r * p + c) = ai(r, c);
            }
        }
        const Vector b = ai * theta0 - errors.row(i).transpose();
        for (Eigen::Index r = 0; r < k; ++r) {
            rows(i, k * p + r) = b(r);
        }
    }
    return dataset(std::move(rows));
}

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++) = x;
    }
    return out;
}

} // namespace fixtures
