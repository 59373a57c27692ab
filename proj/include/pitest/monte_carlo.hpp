#pragma once

#include "pitest/bootstrap.hpp"

#include <optional>
#include <string>

namespace pitest {

enum class DgpKind { linear_gmm, interval_mean, npiv_sieve };

/// linear-gmm, interval-mean, npiv-sieve.
const char* dgp_name(DgpKind kind);
DgpKind parse_dgp(const std::string& name);

/**
 * Built-in data generating processes.
 *
 * linear_gmm: Z ~ N(0, I_k), X = Z Pi + u, Y = X'beta0 + eps with
 * eps = rho u_1 + sqrt(1 - rho^2) e; Pi has `strength` at (j, j mod p).
 * Columns y, x1..xp, z1..zk.
 *
 * interval_mean: X ~ N(-gap/2 + crossing/2, 1), Y ~ N(gap/2 - crossing/2, 1)
 * independent; columns x, y. crossing > gap puts E X above E Y.
 *
 * npiv_sieve: Z ~ U(-1, 1), X = Z + v/2, Y = phi(X)'theta0 + v/2 + e/2 with
 * polynomial sieve phi of length sieve_dim; columns z, x, y.
 */
struct DgpSpec {
    DgpKind kind = DgpKind::linear_gmm;
    int k = 3;
    int p = 1;
    double beta0 = 1.0;
    double strength = 1.0;
    double rho = 0.5;
    double gap = 1.0;
    double crossing = 0.0;
    int sieve_dim = 3;
    double index_half_width = 3.0;
    std::size_t n = 500;
    std::uint64_t seed = 1;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

Dataset generate(const DgpSpec& spec);

/// Sieve coefficients used by npiv_sieve.
Vector npiv_truth(int sieve_dim);

/// Model, family and parameter space of a built-in DGP, fitted to data.
struct BuiltinProblem {
    MomentModel model;
    TestFunctionFamily family;
    ParameterSpace space;
};

/**
 * linear_gmm: efficient two-step weighting (identity first stage, then the
 * inverse sample covariance of g at that estimate; NumericalError when it
 * is singular), Theta = first stage +- 10.
 * interval_mean: moments (x - theta, theta - y) against the nonpositive
 * orthant, Theta spanning the sample means +- 3.
 * npiv_sieve: Y - phi(X)'theta with the exponential family on z, Theta = [-10, 10]^J.
 * `space` overrides the default Theta.
 */
BuiltinProblem builtin_problem(DgpKind kind, const Dataset& data, const DgpSpec& spec = {},
                               std::optional<ParameterSpace> space = std::nullopt);

struct ExperimentResult {
    std::string dgp;
    std::size_t n = 0;
    std::size_t reps = 0;
    double alpha = 0.05;
    double rejection_rate = 0.0;
    std::optional<double> ks_distance;
    std::size_t excluded = 0;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    /// Per-replication statistic (T_n^2 or T_n), NaN when excluded.
    std::vector<double> statistics;
};

struct ExperimentOptions {
    int workers = 0;
    bool serial = false;
    RunOptions run;
};

/**
 * linear_gmm only: T_n^2 with efficient weighting in each replication,
 * KS distance to chi-square(k - p), and the rate of T_n^2 above its
 * 1 - alpha quantile.
 */
ExperimentResult null_distribution_experiment(const DgpSpec& spec, std::size_t reps, double alpha,
                                              const TuningPolicy& tuning = {},
                                              const ExperimentOptions& options = {});

/// Rejection rate of run_test over replications.
ExperimentResult size_power_experiment(const DgpSpec& spec, std::size_t reps, double alpha, Variant variant,
                                       const TuningPolicy& tuning, const ExperimentOptions& options = {});

} // namespace pitest
