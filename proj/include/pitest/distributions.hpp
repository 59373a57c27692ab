#pragma once

#include <functional>
#include <vector>

namespace pitest {

/// Sorted finite sample.
class EmpiricalSample {
public:
    explicit EmpiricalSample(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// P(df/2, x/2); 0 for x <= 0. Throws ConfigError for df < 1.
double chi2_cdf(int df, double x);

/// Inverse of chi2_cdf by bisection; q must lie in (0, 1).
double chi2_quantile(int df, double q);

/// sup_x |F_n(x) - F(x)|. Throws ConfigError for an empty sample.
double ks_statistic(const EmpiricalSample& sample, const std::function<double(double)>& cdf);

} // namespace pitest
