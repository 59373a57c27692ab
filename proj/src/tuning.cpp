#include "pitest/tuning.hpp"

#include <algorithm>
#include <cmath>

namespace pitest {

double Rate::at(double n) const
{
    return coef * std::pow(n, exponent);
}

ResolvedTuning TuningPolicy::resolve(double n, std::optional<double> lipschitz) const
{
    ResolvedTuning t;
    t.n = n;
    t.r = r.at(n);
    t.delta = delta.at(n);
    t.lambda = lambda.at(n);
    t.mu = mu.at(n);
    t.mu_tilde = mu_tilde.at(n);
    if (nu) {
        t.nu = nu->at(n);
    } else if (lipschitz) {
        t.nu = 2.0 * *lipschitz;
    }
    t.c_gamma = c_gamma.value_or(0.0);
    return t;
}

std::vector<std::string> validate_tuning(const TuningPolicy& policy, RemainderOrder remainder)
{
    std::vector<std::string> out;
    auto check = [&out](bool ok, const char* message) {
        if (!ok) {
            out.emplace_back(message);
        }
    };

    const struct {
        const Rate* rate;
        const char* message;
    } coefficients[] = {
        {&policy.r, "coefficient of r_n must be positive"},
        {&policy.delta, "coefficient of δ_n must be positive"},
        {&policy.lambda, "coefficient of λ_n must be positive"},
        {&policy.mu, "coefficient of μ_n must be positive"},
        {&policy.mu_tilde, "coefficient of μ̃_n must be positive"},
    };
    for (const auto& c : coefficients) {
        check(c.rate->coef > 0.0 && std::isfinite(c.rate->coef), c.message);
    }
    if (policy.nu) {
        check(policy.nu->coef > 0.0 && std::isfinite(policy.nu->coef),
              "coefficient of ν_n must be positive");
    }
    if (policy.c_gamma) {
        check(*policy.c_gamma > 0.0 && std::isfinite(*policy.c_gamma), "c_γ must be positive");
    }
    check(policy.bootstrap_draws >= 1, "bootstrap draw count must be positive");

    const double er = policy.r.exponent;
    const double ed = policy.delta.exponent;
    const double el = policy.lambda.exponent;
    const double em = policy.mu.exponent;
    const double emt = policy.mu_tilde.exponent;
    // q_n = (f_v(delta_n) + r_n^{-1}) / delta_n
    const double eq = remainder == RemainderOrder::zero ? -er - ed : std::max(ed, -er - ed);

    check(er > 0.0, "r_n → ∞");
    check(ed < 0.0, "δ_n → 0");
    check(ed > -er, "r_n^{−1} = o(δ_n)");
    check(el > 0.0, "λ_n → ∞");
    check(el + eq < 0.0, "λ_n·q_n = o(1)");
    check(el < em, "λ_n = o(μ_n)");
    check(em < er, "μ_n·r_n^{−1} = o(1)");
    check(emt > 0.0, "μ̃_n → ∞");
    check(emt < er, "μ̃_n·r_n^{−1} = o(1)");
    check(2.0 * el - em < 0.0, "λ_n·f_ℓ(λ_n/μ_n) = o(1)");
    check(emt + el - em < 0.0, "μ̃_n·f_ℓ(λ_n/μ_n) = o(1)");
    return out;
}

} // namespace pitest
