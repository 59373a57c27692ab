#pragma once

#include "pitest/derivative_norm.hpp"
#include "pitest/minimax.hpp"

#include <string>
#include <vector>

namespace pitest {

/// full_* minimize over Theta; plugin_* evaluate at the estimate. The
/// *_Ktilde variants add mu~_n v_n(theta, t) inside the supremum.
enum class Variant { full_K, full_Ktilde, plugin_K, plugin_Ktilde };

const char* variant_name(Variant v);
/// Accepts full_K, full_Ktilde, plugin_K, plugin_Ktilde.
Variant parse_variant(const std::string& name);
bool is_plugin(Variant v);
bool adds_level_term(Variant v);

struct BootstrapOptions {
    /// Outer minimization of the full variants.
    OuterOptions outer = [] {
        OuterOptions o;
        o.restarts = 4;
        return o;
    }();
    /// Random directions added to the probe set of ball-type families.
    int probe_resolution = 32;
    /// Points interpolated between the unpenalized argmax and the K direction.
    int arc_points = 8;
    /// Allowed excess of r_n l_n(theta_hat) over T_n for the plug-in variants.
    double plugin_slack = 1.0;
};

/**
 * Penalized suprema
 *   sup_t [G*_n(theta, t) + lambda_n psi(theta, t) (+ mu~_n v_n(theta, t))]
 * over the probe set, the unpenalized argmax of G*_n, the direction
 * annihilated by the Jacobian, and points between the last two; and the
 * bootstrap statistics built from them. Keeps a reference to the surface.
 */
class BootstrapEngine {
public:
    BootstrapEngine(const PsiSurface& surface, ResolvedTuning tuning, bool level_term,
                    std::vector<TestFunction> probes, BootstrapOptions options = {});

    const std::vector<TestFunction>& probes() const noexcept { return probes_; }
    const ResolvedTuning& tuning() const noexcept { return tuning_; }

    double penalized_sup(const Vector& theta, const MultiplierDraw& draw) const;

    /// mu_n l_n(theta) + penalized_sup(theta, draw).
    double full_objective(const Vector& theta, const MultiplierDraw& draw) const;

    /// inf over Theta of full_objective.
    double full(const MultiplierDraw& draw, std::uint64_t seed,
                const std::vector<Vector>& extra_starts = {}) const;

    /// Caches psi at the probes for repeated plug-in draws at theta_hat.
    void prepare_plugin(const Vector& theta_hat);
    /// penalized_sup at the prepared theta_hat.
    double plugin(const MultiplierDraw& draw) const;

private:
    struct ProcessAt;
    double sup_at(const Vector& theta, const ProcessAt& process, const std::vector<double>* cached) const;

    const PsiSurface* surface_;
    ResolvedTuning tuning_;
    bool level_term_;
    std::vector<TestFunction> probes_;
    BootstrapOptions options_;
    Vector plugin_theta_;
    std::vector<double> plugin_psi_;
};

double bootstrap_statistic_full(const PsiSurface& surface, const ResolvedTuning& tuning,
                                const MultiplierDraw& draw, bool level_term, std::uint64_t seed,
                                const BootstrapOptions& options = {});

/// Throws PreconditionError unless r_n l_n(theta_hat) <= T_n + slack.
double bootstrap_statistic_plugin(const PsiSurface& surface, const OuterInfResult& estimate,
                                  const ResolvedTuning& tuning, const MultiplierDraw& draw,
                                  bool level_term, std::uint64_t seed,
                                  const BootstrapOptions& options = {});

/// Needs 0 < alpha < 1 and alpha * B >= 1/2.
double critical_value(std::vector<double> draws, double alpha,
                      QuantileRule rule = QuantileRule::upper_order_statistic);

/// (1 + #{draws >= statistic}) / (B + 1).
double p_value(const std::vector<double>& draws, double statistic);

struct TestReport {
    double statistic = 0.0;
    Vector theta_hat;
    std::vector<double> draws;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    ResolvedTuning tuning;
    int bootstrap_draws = 0;
    MultiplierKind multiplier = MultiplierKind::gaussian;
    Variant variant = Variant::plugin_K;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    // diagnostics
    int restarts = 0;
    bool converged = false;
    Vector argmax;
};

struct RunOptions {
    OuterOptions outer;
    BootstrapOptions bootstrap;
    PsiMode psi_mode = PsiMode::constrained;
    bool closed_form = true;
    /// <= 0 means all available.
    int workers = 0;
    /// Draw the bootstrap statistics with the serial reference loop.
    bool serial = false;
};

TestReport run_test(const EmpiricalEvaluator& evaluator, const ParameterSpace& space,
                    const TuningPolicy& policy, double alpha, Variant variant, std::uint64_t seed,
                    const RunOptions& options = {});

TestReport run_test(const MomentModel& model, const Dataset& data, const ParameterSpace& space,
                    const TestFunctionFamily& family, const TuningPolicy& policy, double alpha,
                    Variant variant, std::uint64_t seed, const RunOptions& options = {});

/// Throws ConfigError listing every violated rate condition.
void require_valid_tuning(const TuningPolicy& policy, RemainderOrder remainder);

} // namespace pitest
