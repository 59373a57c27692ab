#include "pitest/distributions.hpp"

#include "pitest/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitest {

EmpiricalSample::EmpiricalSample(std::vector<double> values)
    : values_(std::move(values))
{
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DataError("sample contains a non-finite value");
        }
    }
    std::sort(values_.begin(), values_.end());
}

namespace {

// regularized lower incomplete gamma P(a, x), x > 0
double lower_gamma_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction
double upper_gamma_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double chi2_cdf(int df, double x)
{
    if (df < 1) {
        throw ConfigError("chi-square degrees of freedom must be at least 1");
    }
    if (!(x > 0.0)) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    const double a = 0.5 * df;
    const double half = 0.5 * x;
    if (x < df + 1.0) {
        return std::min(1.0, lower_gamma_series(a, half));
    }
    return std::clamp(1.0 - upper_gamma_fraction(a, half), 0.0, 1.0);
}

double chi2_quantile(int df, double q)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw ConfigError("quantile level must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df));
    while (chi2_cdf(df, hi) < q) {
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf(df, mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_statistic(const EmpiricalSample& sample, const std::function<double(double)>& cdf)
{
    const auto n = sample.size();
    if (n == 0) {
        throw ConfigError("KS statistic of an empty sample");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(sample.values()[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(static_cast<double>(i) / n - f)});
    }
    return d;
}

} // namespace pitest
