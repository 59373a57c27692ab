#pragma once

#include "pitest/moment_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pitest {

/// Rate rule c * n^e.
struct Rate {
    double coef = 1.0;
    double exponent = 0.0;

    double at(double n) const;
};

enum class MultiplierKind { gaussian, rademacher };

enum class QuantileRule {
    upper_order_statistic, ///< ceil((1 - alpha) B)-th order statistic
    interpolated,          ///< linear interpolation between order statistics
};

/// Tuning sequences resolved at a sample size.
struct ResolvedTuning {
    double n = 0.0;
    double r = 0.0;
    double delta = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double mu_tilde = 0.0;
    double nu = 0.0;
    double c_gamma = 0.0;
};

/**
 * Rate sequences r_n, delta_n, lambda_n, mu_n, mu~_n, nu_n as exponent
 * rules, with bootstrap settings.
 *
 * Defaults: r = n^{1/2}, delta = n^{-1/4}, lambda = n^{1/8},
 * mu = n^{3/8}, mu~ = n^{1/8}; nu defaults to twice the model's
 * Lipschitz bound.
 */
struct TuningPolicy {
    Rate r{1.0, 0.5};
    Rate delta{1.0, -0.25};
    Rate lambda{1.0, 0.125};
    Rate mu{1.0, 0.375};
    Rate mu_tilde{1.0, 0.125};
    std::optional<Rate> nu;
    /// Constant in the f_l rate conditions; defaults to twice the largest
    /// |psi_hat| seen at the estimate. With a linear f_l it does not change
    /// which exponents are admissible.
    std::optional<double> c_gamma;
    MultiplierKind multiplier = MultiplierKind::gaussian;
    int bootstrap_draws = 399;
    QuantileRule quantile = QuantileRule::upper_order_statistic;

    ResolvedTuning resolve(double n, std::optional<double> lipschitz = std::nullopt) const;
};

/**
 * Checks the rate conditions symbolically on the exponents, for a model
 * with linearization remainder of the given order. Returns one message per
 * violated condition; empty means all conditions hold strictly.
 */
std::vector<std::string> validate_tuning(const TuningPolicy& policy,
                                         RemainderOrder remainder = RemainderOrder::zero);

} // namespace pitest
