#include "pitest/minimax.hpp"

#include <algorithm>
#include <cmath>

namespace pitest {

InnerSupResult family_sup(const TestFunctionFamily& family, const Vector& m)
{
    if (m.size() != family.moment_dim()) {
        throw ConfigError("moment dimension does not match family");
    }
    const int k = family.moment_dim();
    InnerSupResult out;
    switch (family.kind()) {
    case TestFunctionFamily::Kind::weighted_ball: {
        const Vector lm = family.weight_factor().transpose() * m;
        out.value = lm.norm();
        out.argmax = family.element(out.value > 0.0 ? Vector(m / out.value) : Vector(Vector::Zero(k)));
        return out;
    }
    case TestFunctionFamily::Kind::cone_polar_ball: {
        const Vector residual = m - project_cone(m, *family.cone()).point;
        out.value = residual.norm();
        out.argmax = family.element(out.value > 0.0 ? Vector(residual / out.value) : Vector(Vector::Zero(k)));
        return out;
    }
    case TestFunctionFamily::Kind::finite_family: {
        out.value = -std::numeric_limits<double>::infinity();
        for (const auto& v : family.vectors()) {
            const double val = v.dot(m);
            if (val > out.value) {
                out.value = val;
                out.argmax = family.element(v);
            }
        }
        return out;
    }
    case TestFunctionFamily::Kind::exponential_family:
        break;
    }
    throw ConfigError("the exponential family has no closed-form supremum over a mean vector");
}

namespace {

// (1/n) sum_i g_ij trig(zeta' z_i)
double harmonic_mean(const EmpiricalEvaluator& ev, const MomentSnapshot& s, const Vector& index,
                     Harmonic h, int j)
{
    const auto& cols = ev.family().instrument_columns();
    double acc = 0.0;
    for (std::size_t i = 0; i < ev.n(); ++i) {
        const auto row = ev.data().row(i);
        double arg = 0.0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            arg += index(static_cast<Eigen::Index>(c)) * row[cols[c]];
        }
        acc += s.values(static_cast<Eigen::Index>(i), j) * (h == Harmonic::sine ? std::sin(arg) : std::cos(arg));
    }
    return acc / static_cast<double>(ev.n());
}

InnerSupResult exponential_sup(const EmpiricalEvaluator& ev, const MomentSnapshot& s)
{
    const auto& family = ev.family();
    const int k = family.moment_dim();
    const int dz = static_cast<int>(family.instrument_columns().size());
    const double half = family.half_width();
    const int g = family.grid_resolution();
    const double spacing = 2.0 * half / (g - 1);

    struct Best {
        double value = -std::numeric_limits<double>::infinity();
        Vector index;
        Harmonic h = Harmonic::cosine;
        int j = 0;
        double sign = 1.0;
    } best;

    std::vector<int> counter(dz, 0);
    Vector index(dz);
    while (true) {
        for (int i = 0; i < dz; ++i) {
            index(i) = -half + spacing * counter[i];
        }
        for (Harmonic h : {Harmonic::cosine, Harmonic::sine}) {
            for (int j = 0; j < k; ++j) {
                const double a = harmonic_mean(ev, s, index, h, j);
                if (std::abs(a) > best.value) {
                    best = {std::abs(a), index, h, j, a >= 0.0 ? 1.0 : -1.0};
                }
            }
        }
        int i = 0;
        while (i < dz && ++counter[i] == g) {
            counter[i] = 0;
            ++i;
        }
        if (i == dz) {
            break;
        }
    }

    // coordinate-wise golden-section refinement of the index
    auto value_at = [&](const Vector& idx) { return best.sign * harmonic_mean(ev, s, idx, best.h, best.j); };
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < 20; ++sweep) {
        double moved = 0.0;
        for (int c = 0; c < dz; ++c) {
            double lo = std::max(-half, best.index(c) - spacing);
            double hi = std::min(half, best.index(c) + spacing);
            Vector probe = best.index;
            auto f = [&](double x) {
                probe(c) = x;
                return value_at(probe);
            };
            double x1 = hi - ratio * (hi - lo);
            double x2 = lo + ratio * (hi - lo);
            double f1 = f(x1);
            double f2 = f(x2);
            while (hi - lo > 1e-7) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + ratio * (hi - lo);
                    f2 = f(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - ratio * (hi - lo);
                    f1 = f(x1);
                }
            }
            const double x = 0.5 * (lo + hi);
            const double fx = f(x);
            if (fx > best.value) {
                moved = std::max(moved, std::abs(x - best.index(c)));
                best.index(c) = x;
                best.value = fx;
            }
        }
        if (moved < 1e-6) {
            break;
        }
    }

    InnerSupResult out;
    out.value = best.value;
    out.argmax = {best.sign * Vector::Unit(k, best.j), best.index, best.h};
    out.exact = false;
    return out;
}

bool lex_less(const Vector& a, const Vector& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) {
            return a(i) < b(i);
        }
    }
    return false;
}

} // namespace

InnerSupResult inner_sup(const EmpiricalEvaluator& evaluator, const MomentSnapshot& snapshot)
{
    if (evaluator.family().kind() == TestFunctionFamily::Kind::exponential_family) {
        return exponential_sup(evaluator, snapshot);
    }
    return family_sup(evaluator.family(), snapshot.mean);
}

InnerSupResult inner_sup(const EmpiricalEvaluator& evaluator, const Vector& theta)
{
    if (evaluator.family().row_independent()) {
        return family_sup(evaluator.family(), evaluator.mean_moment(theta));
    }
    return inner_sup(evaluator, evaluator.snapshot(theta));
}

double criterion(const EmpiricalEvaluator& evaluator, const Vector& theta)
{
    return inner_sup(evaluator, theta).value;
}

OuterInfResult minimize_over_space(const Objective& objective, const ParameterSpace& space,
                                   double scale, std::uint64_t seed, const OuterOptions& options)
{
    if (options.restarts < 1) {
        throw ConfigError("outer minimization needs at least one restart");
    }
    const Projector project = [&space](const Vector& x) { return space.project(x); };
    SimplexOptions simplex;
    simplex.value_tol = options.value_tol;
    simplex.max_evaluations = options.max_evaluations;
    const double width = (space.upper() - space.lower()).maxCoeff();
    simplex.initial_step = width > 0.0 ? 0.1 * width : 1e-3;

    std::vector<SimplexResult> runs;
    int evaluations = 0;
    for (const auto& start : sample_space(space, seed, static_cast<std::size_t>(options.restarts))) {
        runs.push_back(projected_simplex_descent(objective, project, start, simplex));
        evaluations += runs.back().evaluations;
    }
    for (const auto& start : options.extra_starts) {
        runs.push_back(projected_simplex_descent(objective, project, space.project(start), simplex));
        evaluations += runs.back().evaluations;
    }

    auto best_of = [&]() -> const SimplexResult& {
        double vmin = std::numeric_limits<double>::infinity();
        for (const auto& r : runs) {
            vmin = std::min(vmin, r.value);
        }
        const double tie = 1e-12 * (1.0 + std::abs(vmin));
        const SimplexResult* pick = nullptr;
        for (const auto& r : runs) {
            if (r.value <= vmin + tie && (pick == nullptr || lex_less(r.x, pick->x))) {
                pick = &r;
            }
        }
        return *pick;
    };

    if (space.dim() <= 2 && options.sanity_grid >= 2) {
        const double incumbent = best_of().value;
        Vector grid_best;
        double grid_value = std::numeric_limits<double>::infinity();
        for (const auto& x : grid_over_space(space, options.sanity_grid)) {
            const double v = objective(x);
            ++evaluations;
            if (v < grid_value) {
                grid_value = v;
                grid_best = x;
            }
        }
        if (grid_value < incumbent - options.value_tol) {
            runs.push_back(projected_simplex_descent(objective, project, grid_best, simplex));
            evaluations += runs.back().evaluations;
        }
    }

    const SimplexResult& best = best_of();
    OuterInfResult out;
    out.criterion_value = best.value;
    out.statistic = scale * best.value;
    out.minimizer = best.x;
    out.restarts = static_cast<int>(runs.size());
    out.evaluations = evaluations;

    std::vector<double> values;
    for (const auto& r : runs) {
        values.push_back(r.value);
    }
    std::sort(values.begin(), values.end());
    out.converged = best.converged && (values.size() < 2 || values[1] - values[0] <= options.agreement_tol);
    return out;
}

OuterInfResult outer_inf(const EmpiricalEvaluator& evaluator, const ParameterSpace& space,
                         const TuningPolicy& tuning, std::uint64_t seed, const OuterOptions& options)
{
    if (space.dim() != evaluator.p()) {
        throw ConfigError("parameter space dimension does not match the model");
    }
    const double r = tuning.r.at(static_cast<double>(evaluator.n()));
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw ConfigError("r_n does not resolve to a positive finite value");
    }
    return minimize_over_space([&evaluator](const Vector& theta) { return criterion(evaluator, theta); },
                               space, r, seed, options);
}

} // namespace pitest
