#include "pitest/bootstrap.hpp"

#include "pitest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitest {

const char* variant_name(Variant v)
{
    switch (v) {
    case Variant::full_K: return "full_K";
    case Variant::full_Ktilde: return "full_Ktilde";
    case Variant::plugin_K: return "plugin_K";
    case Variant::plugin_Ktilde: return "plugin_Ktilde";
    }
    return "";
}

Variant parse_variant(const std::string& name)
{
    for (Variant v : {Variant::full_K, Variant::full_Ktilde, Variant::plugin_K, Variant::plugin_Ktilde}) {
        if (name == variant_name(v)) {
            return v;
        }
    }
    throw ConfigError("unknown bootstrap variant '" + name + "'");
}

bool is_plugin(Variant v)
{
    return v == Variant::plugin_K || v == Variant::plugin_Ktilde;
}

bool adds_level_term(Variant v)
{
    return v == Variant::full_Ktilde || v == Variant::plugin_Ktilde;
}

// G*_n at one theta: the multiplier moment vector for row-independent
// families, or a snapshot whose rows are sqrt(n)(xi_i - mean xi) g_i so that
// its pairing means equal G*_n(theta, t).
struct BootstrapEngine::ProcessAt {
    Vector gstar;
    std::optional<MomentSnapshot> rows;
    std::optional<MomentSnapshot> sample;
};

BootstrapEngine::BootstrapEngine(const PsiSurface& surface, ResolvedTuning tuning, bool level_term,
                                 std::vector<TestFunction> probes, BootstrapOptions options)
    : surface_(&surface), tuning_(tuning), level_term_(level_term), probes_(std::move(probes)),
      options_(std::move(options))
{
}

namespace {

Vector unit_or_zero(const Vector& x)
{
    const double r = x.norm();
    return r > 0.0 ? Vector(x / r) : Vector(Vector::Zero(x.size()));
}

} // namespace

double BootstrapEngine::sup_at(const Vector& theta, const ProcessAt& process,
                               const std::vector<double>* cached) const
{
    const auto& ev = surface_->evaluator();
    const auto& family = ev.family();
    const bool linear = family.row_independent();

    Vector mean;
    if (linear && level_term_) {
        mean = ev.mean_moment(theta);
    }
    auto gstar = [&](const TestFunction& t) {
        return linear ? family.weight(t).dot(process.gstar) : ev.v_n(*process.rows, t);
    };
    auto level = [&](const TestFunction& t) {
        return linear ? family.weight(t).dot(mean) : ev.v_n(*process.sample, t);
    };
    auto value = [&](const TestFunction& t, double psi) {
        double v = gstar(t) + tuning_.lambda * psi;
        if (level_term_) {
            v += tuning_.mu_tilde * level(t);
        }
        return v;
    };

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < probes_.size(); ++j) {
        const double psi = cached ? (*cached)[j] : (*surface_)(theta, probes_[j]);
        best = std::max(best, value(probes_[j], psi));
    }

    const TestFunction top = linear ? family_sup(family, process.gstar).argmax : inner_sup(ev, *process.rows).argmax;
    best = std::max(best, value(top, (*surface_)(theta, top)));

    // direction whose pairing with the Jacobian vanishes, and the arc to it
    const auto kind = family.kind();
    if (kind != TestFunctionFamily::Kind::weighted_ball && kind != TestFunctionFamily::Kind::cone_polar_ball) {
        return best;
    }
    const Matrix jac = jacobian(ev, theta).matrix;
    std::vector<Vector> path;
    if (kind == TestFunctionFamily::Kind::weighted_ball) {
        // work in u = L't coordinates, where the family is the unit ball
        const Matrix& lower = family.weight_factor();
        const Matrix lj = lower.transpose() * jac;
        const Vector u = k_projector(lj) * (lower.transpose() * process.gstar);
        if (u.norm() == 0.0) {
            return best;
        }
        const Vector a = lower.transpose() * top.coef;
        const Vector b = u / u.norm();
        auto to_t = [&](const Vector& w) {
            return Vector(lower.transpose().triangularView<Eigen::Upper>().solve(unit_or_zero(w)));
        };
        for (int s = 0; s <= options_.arc_points + 1; ++s) {
            const double w = static_cast<double>(s) / (options_.arc_points + 1);
            path.push_back(to_t((1.0 - w) * a + w * b));
        }
    } else {
        const Vector d = family.polar()->project(k_projector(jac) * process.gstar);
        if (d.norm() == 0.0) {
            return best;
        }
        const Vector b = d / d.norm();
        for (int s = 0; s <= options_.arc_points + 1; ++s) {
            const double w = static_cast<double>(s) / (options_.arc_points + 1);
            path.push_back(family.polar()->project_unit_ball(unit_or_zero((1.0 - w) * top.coef + w * b)));
        }
    }
    for (auto& coef : path) {
        const TestFunction t = family.element(std::move(coef));
        best = std::max(best, value(t, (*surface_)(theta, t)));
    }
    return best;
}

double BootstrapEngine::penalized_sup(const Vector& theta, const MultiplierDraw& draw) const
{
    const auto& ev = surface_->evaluator();
    ProcessAt process;
    const MomentSnapshot s = ev.snapshot(theta);
    process.gstar = ev.multiplier_moment(s, draw);
    if (!ev.family().row_independent()) {
        const double root = std::sqrt(static_cast<double>(ev.n()));
        const double xbar = draw.xi.mean();
        MomentSnapshot rows = s;
        for (Eigen::Index i = 0; i < rows.values.rows(); ++i) {
            rows.values.row(i) *= root * (draw.xi(i) - xbar);
        }
        rows.mean = process.gstar;
        process.rows = std::move(rows);
        process.sample = s;
    }
    const bool cached = plugin_psi_.size() == probes_.size() && plugin_theta_.size() == theta.size() &&
                        plugin_theta_ == theta;
    return sup_at(theta, process, cached ? &plugin_psi_ : nullptr);
}

double BootstrapEngine::full_objective(const Vector& theta, const MultiplierDraw& draw) const
{
    return tuning_.mu * criterion(surface_->evaluator(), theta) + penalized_sup(theta, draw);
}

double BootstrapEngine::full(const MultiplierDraw& draw, std::uint64_t seed,
                             const std::vector<Vector>& extra_starts) const
{
    const auto& ev = surface_->evaluator();
    Objective objective;
    std::optional<AffineRow> affine;
    if (ev.model().is_affine() && ev.family().row_independent()) {
        affine = ev.multiplier_affine(draw);
        objective = [this, &ev, &affine](const Vector& theta) {
            ProcessAt process;
            process.gstar = affine->slope * theta + affine->offset;
            return tuning_.mu * criterion(ev, theta) + sup_at(theta, process, nullptr);
        };
    } else {
        objective = [this, &draw](const Vector& theta) { return full_objective(theta, draw); };
    }
    OuterOptions outer = options_.outer;
    outer.extra_starts.insert(outer.extra_starts.end(), extra_starts.begin(), extra_starts.end());
    return minimize_over_space(objective, surface_->space(), 1.0, seed, outer).statistic;
}

void BootstrapEngine::prepare_plugin(const Vector& theta_hat)
{
    plugin_theta_ = theta_hat;
    plugin_psi_.clear();
    for (const auto& t : probes_) {
        plugin_psi_.push_back((*surface_)(theta_hat, t));
    }
}

double BootstrapEngine::plugin(const MultiplierDraw& draw) const
{
    if (plugin_theta_.size() == 0) {
        throw PreconditionError("prepare_plugin must be called before plug-in draws");
    }
    return penalized_sup(plugin_theta_, draw);
}

double bootstrap_statistic_full(const PsiSurface& surface, const ResolvedTuning& tuning,
                                const MultiplierDraw& draw, bool level_term, std::uint64_t seed,
                                const BootstrapOptions& options)
{
    const auto probes = surface.evaluator().family().probe_set(options.probe_resolution, derive_seed(seed, 1));
    const BootstrapEngine engine(surface, tuning, level_term, probes, options);
    return engine.full(draw, derive_seed(seed, 2));
}

namespace {

void check_near_minimizer(const EmpiricalEvaluator& ev, const OuterInfResult& estimate, double r, double slack)
{
    const double at = r * criterion(ev, estimate.minimizer);
    if (!(at <= estimate.statistic + slack)) {
        throw PreconditionError("plug-in point is not a near-minimizer: r_n l_n(theta_hat) = " +
                                std::to_string(at) + " exceeds T_n = " + std::to_string(estimate.statistic));
    }
}

} // namespace

double bootstrap_statistic_plugin(const PsiSurface& surface, const OuterInfResult& estimate,
                                  const ResolvedTuning& tuning, const MultiplierDraw& draw,
                                  bool level_term, std::uint64_t seed, const BootstrapOptions& options)
{
    check_near_minimizer(surface.evaluator(), estimate, tuning.r, options.plugin_slack);
    const auto probes = surface.evaluator().family().probe_set(options.probe_resolution, derive_seed(seed, 1));
    BootstrapEngine engine(surface, tuning, level_term, probes, options);
    engine.prepare_plugin(estimate.minimizer);
    return engine.plugin(draw);
}

double critical_value(std::vector<double> draws, double alpha, QuantileRule rule)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    const auto b = draws.size();
    if (b == 0 || alpha * static_cast<double>(b) < 0.5) {
        throw ConfigError("too few bootstrap draws (" + std::to_string(b) + ") for alpha = " +
                          std::to_string(alpha));
    }
    std::sort(draws.begin(), draws.end());
    const double level = (1.0 - alpha) * static_cast<double>(b);
    if (rule == QuantileRule::upper_order_statistic) {
        const auto index = static_cast<std::size_t>(std::ceil(level - 1e-9));
        return draws[std::clamp<std::size_t>(index, 1, b) - 1];
    }
    const double pos = (1.0 - alpha) * static_cast<double>(b - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, b - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * draws[lo] + w * draws[hi];
}

double p_value(const std::vector<double>& draws, double statistic)
{
    const auto at_least = std::count_if(draws.begin(), draws.end(), [&](double d) { return d >= statistic; });
    return (1.0 + static_cast<double>(at_least)) / (static_cast<double>(draws.size()) + 1.0);
}

void require_valid_tuning(const TuningPolicy& policy, RemainderOrder remainder)
{
    const auto problems = validate_tuning(policy, remainder);
    if (problems.empty()) {
        return;
    }
    std::string message = "tuning violates rate conditions:";
    for (const auto& p : problems) {
        message += " [" + p + "]";
    }
    throw ConfigError(message);
}

TestReport run_test(const EmpiricalEvaluator& evaluator, const ParameterSpace& space,
                    const TuningPolicy& policy, double alpha, Variant variant, std::uint64_t seed,
                    const RunOptions& options)
{
    require_valid_tuning(policy, evaluator.model().remainder());
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    if (alpha * policy.bootstrap_draws < 0.5) {
        throw ConfigError("too few bootstrap draws for alpha = " + std::to_string(alpha));
    }
    const double n = static_cast<double>(evaluator.n());
    ResolvedTuning tuning = policy.resolve(n, evaluator.model().lipschitz());

    TestReport report;
    report.variant = variant;
    report.alpha = alpha;
    report.seed = seed;
    report.bootstrap_draws = policy.bootstrap_draws;
    report.multiplier = policy.multiplier;

    const OuterInfResult estimate = outer_inf(evaluator, space, policy, derive_seed(seed, 0), options.outer);
    report.statistic = estimate.statistic;
    report.theta_hat = estimate.minimizer;
    report.restarts = estimate.restarts;
    report.converged = estimate.converged;
    report.argmax = inner_sup(evaluator, estimate.minimizer).argmax.coef;

    PsiSurface surface(evaluator, space, tuning.delta, tuning.nu, options.psi_mode);
    surface.set_closed_form(options.closed_form);
    const auto probes = evaluator.family().probe_set(options.bootstrap.probe_resolution, derive_seed(seed, 1));
    BootstrapEngine engine(surface, tuning, adds_level_term(variant), probes, options.bootstrap);
    if (is_plugin(variant)) {
        check_near_minimizer(evaluator, estimate, tuning.r, options.bootstrap.plugin_slack);
    }
    engine.prepare_plugin(estimate.minimizer);

    if (!policy.c_gamma) {
        double largest = 0.0;
        for (const auto& t : probes) {
            largest = std::max(largest, std::abs(surface(estimate.minimizer, t)));
        }
        tuning.c_gamma = 2.0 * largest;
    }
    report.tuning = tuning;

    const auto count = static_cast<std::size_t>(policy.bootstrap_draws);
    report.draws.assign(count, 0.0);
    const std::uint64_t draw_seed = derive_seed(seed, 2);
    const std::uint64_t outer_seed = derive_seed(seed, 3);
    const std::vector<Vector> anchor{estimate.minimizer};
    auto task = [&](std::size_t b) {
        const auto draw = MultiplierDraw::generate(evaluator.n(), policy.multiplier, draw_seed, b);
        report.draws[b] = is_plugin(variant) ? engine.plugin(draw)
                                             : engine.full(draw, derive_seed(outer_seed, b), anchor);
        if (!std::isfinite(report.draws[b])) {
            throw NumericalError("non-finite bootstrap draw " + std::to_string(b));
        }
    };
    if (options.serial) {
        serial_for(count, task);
    } else {
        parallel_for(count, options.workers, task);
    }

    report.critical_value = critical_value(report.draws, alpha, policy.quantile);
    report.p_value = p_value(report.draws, report.statistic);
    report.reject = report.statistic > report.critical_value;
    return report;
}

TestReport run_test(const MomentModel& model, const Dataset& data, const ParameterSpace& space,
                    const TestFunctionFamily& family, const TuningPolicy& policy, double alpha,
                    Variant variant, std::uint64_t seed, const RunOptions& options)
{
    const EmpiricalEvaluator evaluator(model, data, family);
    return run_test(evaluator, space, policy, alpha, variant, seed, options);
}

} // namespace pitest
