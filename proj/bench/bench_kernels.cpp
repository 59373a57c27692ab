// Serial reference loops against the OpenMP kernels for the two
// embarrassingly parallel workloads: bootstrap draws and Monte Carlo
// replications. The argument is the worker count; 0 selects the serial loop.
#include "pitest/bootstrap.hpp"
#include "pitest/monte_carlo.hpp"
#include "pitest/parallel.hpp"

#include <benchmark/benchmark.h>

using namespace pitest;

namespace {

struct Fixture {
    DgpSpec spec;
    Dataset data;
    BuiltinProblem problem;
    EmpiricalEvaluator evaluator;
};

Fixture make_fixture(DgpKind kind, std::size_t n)
{
    DgpSpec spec;
    spec.kind = kind;
    spec.n = n;
    spec.seed = 11;
    Dataset data = generate(spec);
    BuiltinProblem problem = builtin_problem(kind, data, spec);
    EmpiricalEvaluator evaluator(problem.model, data, problem.family);
    return {spec, std::move(data), std::move(problem), std::move(evaluator)};
}

void bootstrap_draws(benchmark::State& state, DgpKind kind, Variant variant)
{
    const Fixture f = make_fixture(kind, 500);
    const TuningPolicy policy;
    const ResolvedTuning tuning = policy.resolve(500.0, f.problem.model.lipschitz());
    const OuterInfResult estimate = outer_inf(f.evaluator, f.problem.space, policy, 1);
    const PsiSurface surface(f.evaluator, f.problem.space, tuning.delta, tuning.nu);
    BootstrapEngine engine(surface, tuning, adds_level_term(variant), f.evaluator.family().probe_set(32, 2));
    engine.prepare_plugin(estimate.minimizer);

    const std::size_t draws = is_plugin(variant) ? 399 : 40;
    const auto workers = static_cast<int>(state.range(0));
    std::vector<double> out(draws);
    auto task = [&](std::size_t b) {
        const auto draw = MultiplierDraw::generate(500, MultiplierKind::gaussian, 3, b);
        out[b] = is_plugin(variant) ? engine.plugin(draw) : engine.full(draw, b, {estimate.minimizer});
    };
    for (auto _ : state) {
        if (workers == 0) {
            serial_for(draws, task);
        } else {
            parallel_for(draws, workers, task);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * draws));
}

void monte_carlo(benchmark::State& state)
{
    DgpSpec spec;
    spec.kind = DgpKind::linear_gmm;
    spec.n = 500;
    spec.seed = 5;
    ExperimentOptions options;
    options.serial = state.range(0) == 0;
    options.workers = static_cast<int>(state.range(0));
    const std::size_t reps = 200;
    for (auto _ : state) {
        const ExperimentResult r = null_distribution_experiment(spec, reps, 0.05, {}, options);
        benchmark::DoNotOptimize(r.ks_distance);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * reps));
}

void worker_args(benchmark::internal::Benchmark* b)
{
    b->Arg(0);
    for (int w = 1; w <= default_workers(); w *= 2) {
        b->Arg(w);
    }
    if (default_workers() == 1) {
        b->Arg(2);
    }
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK_CAPTURE(bootstrap_draws, interval_plugin, DgpKind::interval_mean, Variant::plugin_K)->Apply(worker_args);
BENCHMARK_CAPTURE(bootstrap_draws, gmm_plugin, DgpKind::linear_gmm, Variant::plugin_K)->Apply(worker_args);
BENCHMARK_CAPTURE(bootstrap_draws, gmm_full, DgpKind::linear_gmm, Variant::full_K)->Apply(worker_args);
BENCHMARK(monte_carlo)->Apply(worker_args);

BENCHMARK_MAIN();
