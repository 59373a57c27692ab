#pragma once

#include "pitest/dataset.hpp"
#include "pitest/moment_model.hpp"
#include "pitest/test_family.hpp"
#include "pitest/tuning.hpp"

#include <optional>

namespace pitest {

/// Per-observation moment values at one parameter value.
struct MomentSnapshot {
    Vector theta;
    RowMatrix values; ///< n x k
    Vector mean;      ///< m_n(theta)
};

/// Bootstrap multipliers xi_1..xi_n, reproducible from (seed, index).
struct MultiplierDraw {
    Vector xi;
    MultiplierKind kind = MultiplierKind::gaussian;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    static MultiplierDraw generate(std::size_t n, MultiplierKind kind, std::uint64_t seed,
                                   std::uint64_t index);
    static MultiplierDraw zeros(std::size_t n);
};

/// v_n(theta, t) = slope' theta + offset for models affine in theta.
struct AffineForm {
    Vector slope;
    double offset = 0.0;
};

/**
 * Evaluates the empirical criterion pieces v_n(theta, t), m_n(theta) and
 * the multiplier process G*_n(theta, t) for a model, dataset and family.
 * Immutable after construction.
 */
class EmpiricalEvaluator {
public:
    EmpiricalEvaluator(MomentModel model, Dataset data, TestFunctionFamily family);

    std::size_t n() const noexcept { return data_.n(); }
    int k() const noexcept { return model_.k(); }
    int p() const noexcept { return model_.p(); }

    const MomentModel& model() const noexcept { return model_; }
    const Dataset& data() const noexcept { return data_; }
    const TestFunctionFamily& family() const noexcept { return family_; }

    /// Throws DataError naming the row on non-finite moment values.
    MomentSnapshot snapshot(const Vector& theta) const;
    Vector mean_moment(const Vector& theta) const;

    double v_n(const Vector& theta, const TestFunction& t) const;
    double v_n(const MomentSnapshot& s, const TestFunction& t) const;

    /// Present when the model is affine in theta.
    std::optional<AffineForm> linearize(const TestFunction& t) const;

    /// Mean Jacobian of m_n for affine models.
    const Matrix& mean_slope() const { return mean_slope_; }

    /// n^{-1/2} sum_i xi_i (pair(t, g_i) - v_n(theta, t)).
    double multiplier_process(const MomentSnapshot& s, const TestFunction& t,
                              const MultiplierDraw& draw) const;

    /// n^{-1/2} sum_i xi_i (g_i - mean); for row-independent families
    /// G*_n(theta, t) equals pair(t, this vector).
    Vector multiplier_moment(const MomentSnapshot& s, const MultiplierDraw& draw) const;

    /// Affine models: multiplier_moment at theta equals slope * theta + offset.
    AffineRow multiplier_affine(const MultiplierDraw& draw) const;

private:
    void check_draw(const MultiplierDraw& draw) const;

    MomentModel model_;
    Dataset data_;
    TestFunctionFamily family_;
    // affine models only
    RowMatrix slopes_;  ///< n x (k*p), row-major k x p blocks
    RowMatrix offsets_; ///< n x k
    Matrix mean_slope_;
    Vector mean_offset_;
};

double v_n(const EmpiricalEvaluator& evaluator, const Vector& theta, const TestFunction& t);
double multiplier_process(const EmpiricalEvaluator& evaluator, const Vector& theta,
                          const TestFunction& t, const MultiplierDraw& draw);

} // namespace pitest
