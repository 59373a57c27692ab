#pragma once

#include "pitest/bootstrap.hpp"
#include "pitest/monte_carlo.hpp"

#include <string>

namespace pitest {

/// {statistic, theta_hat, critical_value, p_value, reject, draws, tuning, seed}
std::string report_json(const TestReport& report, int indent = 2);

/// {dgp, n, reps, alpha, rejection_rate, ks_distance, excluded, seed, runtime_seconds}
std::string experiment_json(const ExperimentResult& result, int indent = 2);

const char* multiplier_name(MultiplierKind kind);
/// gaussian or rademacher.
MultiplierKind parse_multiplier(const std::string& name);

} // namespace pitest
