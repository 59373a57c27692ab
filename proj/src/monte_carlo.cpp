#include "pitest/monte_carlo.hpp"

#include "pitest/distributions.hpp"
#include "pitest/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace pitest {

const char* dgp_name(DgpKind kind)
{
    switch (kind) {
    case DgpKind::linear_gmm: return "linear-gmm";
    case DgpKind::interval_mean: return "interval-mean";
    case DgpKind::npiv_sieve: return "npiv-sieve";
    }
    return "";
}

DgpKind parse_dgp(const std::string& name)
{
    for (DgpKind k : {DgpKind::linear_gmm, DgpKind::interval_mean, DgpKind::npiv_sieve}) {
        if (name == dgp_name(k)) {
            return k;
        }
    }
    throw ConfigError("unknown data generating process '" + name + "'");
}

void DgpSpec::validate() const
{
    if (n < 2) {
        throw ConfigError("sample size must be at least 2");
    }
    switch (kind) {
    case DgpKind::linear_gmm:
        if (p < 1 || k <= p) {
            throw ConfigError("linear-gmm needs k > p >= 1");
        }
        if (!(std::abs(rho) < 1.0)) {
            throw ConfigError("linear-gmm needs |rho| < 1");
        }
        break;
    case DgpKind::interval_mean:
        if (!(gap >= 0.0) || !(crossing >= 0.0)) {
            throw ConfigError("interval-mean needs gap >= 0 and crossing >= 0");
        }
        break;
    case DgpKind::npiv_sieve:
        if (sieve_dim < 1) {
            throw ConfigError("npiv-sieve needs a positive sieve dimension");
        }
        if (!(index_half_width > 0.0)) {
            throw ConfigError("npiv-sieve needs a positive index half-width");
        }
        break;
    }
}

Vector npiv_truth(int sieve_dim)
{
    Vector theta(sieve_dim);
    for (int j = 0; j < sieve_dim; ++j) {
        theta(j) = std::pow(-0.5, j);
    }
    return theta;
}

namespace {

Vector sieve(double x, int dim)
{
    Vector phi(dim);
    double power = 1.0;
    for (int j = 0; j < dim; ++j) {
        phi(j) = power;
        power *= x;
    }
    return phi;
}

} // namespace

Dataset generate(const DgpSpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(spec.n);

    switch (spec.kind) {
    case DgpKind::linear_gmm: {
        const int k = spec.k;
        const int p = spec.p;
        RowMatrix rows(n, 1 + p + k);
        std::vector<std::string> names{"y"};
        for (int j = 1; j <= p; ++j) {
            names.push_back("x" + std::to_string(j));
        }
        for (int j = 1; j <= k; ++j) {
            names.push_back("z" + std::to_string(j));
        }
        Matrix pi = Matrix::Zero(k, p);
        for (int j = 0; j < k; ++j) {
            pi(j, j % p) = spec.strength;
        }
        const double tail = std::sqrt(1.0 - spec.rho * spec.rho);
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector z(k);
            for (int j = 0; j < k; ++j) {
                z(j) = normal(rng);
            }
            Vector u(p);
            for (int j = 0; j < p; ++j) {
                u(j) = normal(rng);
            }
            const double eps = spec.rho * u(0) + tail * normal(rng);
            const Vector x = pi.transpose() * z + u;
            rows(i, 0) = spec.beta0 * x.sum() + eps;
            rows.row(i).segment(1, p) = x.transpose();
            rows.row(i).segment(1 + p, k) = z.transpose();
        }
        return Dataset(std::move(rows), std::move(names));
    }
    case DgpKind::interval_mean: {
        const double ex = -0.5 * spec.gap + 0.5 * spec.crossing;
        const double ey = 0.5 * spec.gap - 0.5 * spec.crossing;
        RowMatrix rows(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            rows(i, 0) = ex + normal(rng);
            rows(i, 1) = ey + normal(rng);
        }
        return Dataset(std::move(rows), {"x", "y"});
    }
    case DgpKind::npiv_sieve: {
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        const Vector truth = npiv_truth(spec.sieve_dim);
        RowMatrix rows(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = uniform(rng);
            const double v = normal(rng);
            const double x = z + 0.5 * v;
            rows(i, 0) = z;
            rows(i, 1) = x;
            rows(i, 2) = sieve(x, spec.sieve_dim).dot(truth) + 0.5 * v + 0.5 * normal(rng);
        }
        return Dataset(std::move(rows), {"z", "x", "y"});
    }
    }
    throw ConfigError("unknown data generating process");
}

namespace {

std::vector<std::size_t> numbered_columns(const Dataset& data, char prefix)
{
    std::vector<std::size_t> out;
    for (int j = 1;; ++j) {
        const std::string name = prefix + std::to_string(j);
        const auto& cols = data.columns();
        const auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end()) {
            break;
        }
        out.push_back(static_cast<std::size_t>(it - cols.begin()));
    }
    return out;
}

BuiltinProblem linear_gmm_problem(const Dataset& data, std::optional<ParameterSpace> space)
{
    const std::size_t yc = data.column("y");
    const auto xc = numbered_columns(data, 'x');
    const auto zc = numbered_columns(data, 'z');
    const int p = static_cast<int>(xc.size());
    const int k = static_cast<int>(zc.size());
    if (p < 1 || k <= p) {
        throw DataError("linear-gmm data needs columns y, x1..xp, z1..zk with k > p >= 1");
    }
    MomentModel model = MomentModel::affine(k, p, [=](std::span<const double> row) {
        Vector z(k);
        Vector x(p);
        for (int j = 0; j < k; ++j) {
            z(j) = row[zc[j]];
        }
        for (int j = 0; j < p; ++j) {
            x(j) = row[xc[j]];
        }
        return AffineRow{-z * x.transpose(), z * row[yc]};
    });

    // identity-weighted first stage, then the inverse covariance of g there
    Matrix slope = Matrix::Zero(k, p);
    Vector offset = Vector::Zero(k);
    std::vector<AffineRow> rows;
    rows.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        rows.push_back(model.affine_row(data.row(i)));
        slope += rows.back().slope;
        offset += rows.back().offset;
    }
    slope /= static_cast<double>(data.n());
    offset /= static_cast<double>(data.n());
    const Vector first = slope.colPivHouseholderQr().solve(-offset);
    if (!first.allFinite()) {
        throw NumericalError("first-stage estimate is not finite");
    }
    const Vector mean = slope * first + offset;
    Matrix cov = Matrix::Zero(k, k);
    for (const auto& r : rows) {
        const Vector g = r.slope * first + r.offset - mean;
        cov += g * g.transpose();
    }
    cov /= static_cast<double>(data.n());
    Eigen::LLT<Matrix> llt(cov);
    const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
    if (llt.info() != Eigen::Success || !(diag.array() > 1e-8 * std::sqrt(cov.diagonal().maxCoeff())).all()) {
        throw NumericalError("singular weight matrix: moment covariance is not positive definite", first);
    }
    Matrix weight = llt.solve(Matrix::Identity(k, k));
    weight = 0.5 * (weight + weight.transpose()).eval();
    auto family = TestFunctionFamily::weighted_ball(weight);

    Eigen::JacobiSVD<Matrix> svd(family.weight_factor().transpose() * slope);
    model.with_lipschitz(svd.singularValues()(0));
    if (!space) {
        space = ParameterSpace::box(first.array() - 10.0, first.array() + 10.0);
    }
    return {std::move(model), std::move(family), std::move(*space)};
}

BuiltinProblem interval_problem(const Dataset& data, std::optional<ParameterSpace> space)
{
    const std::size_t xc = data.column("x");
    const std::size_t yc = data.column("y");
    MomentModel model = MomentModel::affine(2, 1, [=](std::span<const double> row) {
        Matrix slope(2, 1);
        slope << -1.0, 1.0;
        Vector offset(2);
        offset << row[xc], -row[yc];
        return AffineRow{std::move(slope), std::move(offset)};
    });
    model.with_lipschitz(std::sqrt(2.0));
    if (!space) {
        double xbar = 0.0;
        double ybar = 0.0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            xbar += data.row(i)[xc];
            ybar += data.row(i)[yc];
        }
        xbar /= static_cast<double>(data.n());
        ybar /= static_cast<double>(data.n());
        space = ParameterSpace::box(Vector::Constant(1, std::min(xbar, ybar) - 3.0),
                                    Vector::Constant(1, std::max(xbar, ybar) + 3.0));
    }
    return {std::move(model), TestFunctionFamily::cone_polar_ball(FinitelyGeneratedCone::nonpositive_orthant(2)),
            std::move(*space)};
}

BuiltinProblem npiv_problem(const Dataset& data, const DgpSpec& spec, std::optional<ParameterSpace> space)
{
    const std::size_t zc = data.column("z");
    const std::size_t xc = data.column("x");
    const std::size_t yc = data.column("y");
    const int dim = spec.sieve_dim;
    MomentModel model = MomentModel::affine(1, dim, [=](std::span<const double> row) {
        return AffineRow{-sieve(row[xc], dim).transpose(), Vector::Constant(1, row[yc])};
    });
    double lip = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        lip += sieve(data.row(i)[xc], dim).norm();
    }
    model.with_lipschitz(lip / static_cast<double>(data.n()));
    if (!space) {
        space = ParameterSpace::box(Vector::Constant(dim, -10.0), Vector::Constant(dim, 10.0));
    }
    return {std::move(model), TestFunctionFamily::exponential_family(1, {zc}, spec.index_half_width),
            std::move(*space)};
}

} // namespace

BuiltinProblem builtin_problem(DgpKind kind, const Dataset& data, const DgpSpec& spec,
                               std::optional<ParameterSpace> space)
{
    switch (kind) {
    case DgpKind::linear_gmm: return linear_gmm_problem(data, std::move(space));
    case DgpKind::interval_mean: return interval_problem(data, std::move(space));
    case DgpKind::npiv_sieve: return npiv_problem(data, spec, std::move(space));
    }
    throw ConfigError("unknown data generating process");
}

namespace {

struct Replication {
    bool excluded = false;
    bool reject = false;
    double statistic = std::numeric_limits<double>::quiet_NaN();
};

ExperimentResult run_replications(const DgpSpec& spec, std::size_t reps, double alpha,
                                  const ExperimentOptions& options,
                                  const std::function<Replication(const DgpSpec&, std::uint64_t)>& one)
{
    if (reps < 1) {
        throw ConfigError("replication count must be positive");
    }
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<Replication> results(reps);
    auto task = [&](std::size_t r) {
        DgpSpec local = spec;
        local.seed = derive_seed(spec.seed, 2 * r);
        try {
            results[r] = one(local, derive_seed(spec.seed, 2 * r + 1));
        } catch (const NumericalError&) {
            results[r] = Replication{true, false, std::numeric_limits<double>::quiet_NaN()};
        }
    };
    if (options.serial) {
        serial_for(reps, task);
    } else {
        parallel_for(reps, options.workers, task);
    }

    ExperimentResult out;
    out.dgp = dgp_name(spec.kind);
    out.n = spec.n;
    out.reps = reps;
    out.alpha = alpha;
    out.seed = spec.seed;
    std::size_t rejections = 0;
    for (const auto& r : results) {
        out.statistics.push_back(r.statistic);
        out.excluded += r.excluded ? 1 : 0;
        rejections += (!r.excluded && r.reject) ? 1 : 0;
    }
    const std::size_t kept = reps - out.excluded;
    out.rejection_rate = kept > 0 ? static_cast<double>(rejections) / static_cast<double>(kept) : 0.0;
    out.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace

ExperimentResult null_distribution_experiment(const DgpSpec& spec, std::size_t reps, double alpha,
                                              const TuningPolicy& tuning, const ExperimentOptions& options)
{
    if (spec.kind != DgpKind::linear_gmm) {
        throw ConfigError("the null-distribution experiment needs the linear-gmm process");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    const int df = spec.k - spec.p;
    const double cutoff = chi2_quantile(df, 1.0 - alpha);
    auto result = run_replications(spec, reps, alpha, options, [&](const DgpSpec& local, std::uint64_t seed) {
        const Dataset data = generate(local);
        const BuiltinProblem problem = builtin_problem(DgpKind::linear_gmm, data, local);
        const EmpiricalEvaluator evaluator(problem.model, data, problem.family);
        const double t = outer_inf(evaluator, problem.space, tuning, seed, options.run.outer).statistic;
        Replication r;
        r.statistic = t * t;
        r.reject = r.statistic > cutoff;
        return r;
    });
    std::vector<double> kept;
    for (double s : result.statistics) {
        if (!std::isnan(s)) {
            kept.push_back(s);
        }
    }
    if (!kept.empty()) {
        result.ks_distance = ks_statistic(EmpiricalSample(kept), [df](double x) { return chi2_cdf(df, x); });
    }
    return result;
}

ExperimentResult size_power_experiment(const DgpSpec& spec, std::size_t reps, double alpha, Variant variant,
                                       const TuningPolicy& tuning, const ExperimentOptions& options)
{
    RunOptions run = options.run;
    run.serial = true;
    run.workers = 1;
    return run_replications(spec, reps, alpha, options, [&](const DgpSpec& local, std::uint64_t seed) {
        const Dataset data = generate(local);
        const BuiltinProblem problem = builtin_problem(local.kind, data, local);
        const EmpiricalEvaluator evaluator(problem.model, data, problem.family);
        const TestReport report = run_test(evaluator, problem.space, tuning, alpha, variant, seed, run);
        return Replication{false, report.reject, report.statistic};
    });
}

} // namespace pitest
