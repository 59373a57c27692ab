#pragma once

#include "pitest/empirical_process.hpp"
#include "pitest/parameter_space.hpp"
#include "pitest/simplex_search.hpp"

namespace pitest {

struct InnerSupResult {
    double value = 0.0;
    TestFunction argmax;
    bool exact = true;
};

/// sup over a row-independent family of pair(t, m), in closed form.
InnerSupResult family_sup(const TestFunctionFamily& family, const Vector& m);

/// l_n(theta) = sup_t v_n(theta, t) with its maximizer.
InnerSupResult inner_sup(const EmpiricalEvaluator& evaluator, const Vector& theta);
InnerSupResult inner_sup(const EmpiricalEvaluator& evaluator, const MomentSnapshot& snapshot);

/// l_n(theta) only.
double criterion(const EmpiricalEvaluator& evaluator, const Vector& theta);

struct OuterOptions {
    int restarts = 16;
    double value_tol = 1e-8;
    int max_evaluations = 4000;
    /// Points per dimension of the final grid probe (p <= 2 only).
    int sanity_grid = 21;
    double agreement_tol = 1e-4;
    /// Starting points tried in addition to the sampled ones.
    std::vector<Vector> extra_starts;
};

struct OuterInfResult {
    double statistic = 0.0;       ///< r_n * min value
    double criterion_value = 0.0; ///< min value
    Vector minimizer;
    int restarts = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Multi-start projected simplex descent of `objective` over the space.
OuterInfResult minimize_over_space(const Objective& objective, const ParameterSpace& space,
                                   double scale, std::uint64_t seed, const OuterOptions& options = {});

/// T_n = r_n inf_theta l_n(theta).
OuterInfResult outer_inf(const EmpiricalEvaluator& evaluator, const ParameterSpace& space,
                         const TuningPolicy& tuning, std::uint64_t seed,
                         const OuterOptions& options = {});

} // namespace pitest
