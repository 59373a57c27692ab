// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include "fixtures.hpp"
#include "oracles.hpp"

#include "pitest/bootstrap.hpp"
#include "pitest/cone.hpp"
#include "pitest/derivative_norm.hpp"
#include "pitest/local_geometry.hpp"
#include "pitest/minimax.hpp"
#include "pitest/monte_carlo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace pitest;
using fixtures::vec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> z;
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) = z(rng);
    }
    return a;
}

Outcome chi_square_null()
{
    DgpSpec spec;
    spec.kind = DgpKind::linear_gmm;
    spec.k = 3;
    spec.p = 1;
    spec.n = 1000;
    spec.seed = 20240601;
    const ExperimentResult r = null_distribution_experiment(spec, 2000, 0.05);
    std::ostringstream s;
    s << "KS distance to chi2(2) = " << *r.ks_distance << " over " << r.reps - r.excluded << " replications";
    return {*r.ks_distance < 0.05 && r.excluded == 0, s.str()};
}

Outcome cone_duality()
{
    std::mt19937_64 rng(7);
    double worst = 0.0;
    int failures = 0;
    for (int k = 2; k <= 5; ++k) {
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 1 + static_cast<int>(rng() % 8);
            const FinitelyGeneratedCone cone(gaussian_matrix(rng, k, m));
            const Vector x = 2.0 * gaussian_matrix(rng, k, 1).col(0);
            const double gap = std::abs(distance_primal(x, cone) - distance_dual(x, cone).value);
            worst = std::max(worst, gap / (1.0 + x.norm()));
            failures += gap > 1e-6 * (1.0 + x.norm()) ? 1 : 0;
        }
    }
    std::ostringstream s;
    s << "400 pairs, worst |primal - dual| / (1 + |x|) = " << worst;
    return {failures == 0, s.str()};
}

Outcome proposition_one()
{
    DgpSpec spec;
    spec.kind = DgpKind::interval_mean;
    spec.gap = 1.0;
    spec.n = 500;
    const double ex = -0.5 * spec.gap;
    const double ey = 0.5 * spec.gap;
    const auto identified = ParameterSpace::box(vec({ex}), vec({ey}));
    const auto family = TestFunctionFamily::cone_polar_ball(FinitelyGeneratedCone::nonpositive_orthant(2));
    const TuningPolicy policy;
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t rep = 0; rep < 500; ++rep) {
        spec.seed = derive_seed(99, rep);
        const Dataset data = generate(spec);
        const BuiltinProblem problem = builtin_problem(spec.kind, data, spec, identified);
        const EmpiricalEvaluator ev(problem.model, data, problem.family);
        const double lhs = outer_inf(ev, identified, policy, rep).statistic;
        const double root = std::sqrt(static_cast<double>(spec.n));
        double rhs = std::numeric_limits<double>::infinity();
        for (const Vector& theta : grid_over_space(identified, 201)) {
            // G_n(theta) = sqrt(n) (m_n(theta) - m(theta))
            const Vector m = vec({ex - theta(0), theta(0) - ey});
            rhs = std::min(rhs, family_sup(family, root * (ev.mean_moment(theta) - m)).value);
        }
        worst = std::max(worst, lhs - rhs);
        violations += lhs > rhs + 1e-8 ? 1 : 0;
    }
    std::ostringstream s;
    s << "500 replications, " << violations << " violations, max(lhs - rhs) = " << worst;
    return {violations == 0, s.str()};
}

Outcome minimax_exchange()
{
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + trial % 2;
        const int k = 2 + static_cast<int>(rng() % 3);
        const int m = 2 + static_cast<int>(rng() % 4);
        const Matrix a = gaussian_matrix(rng, k, p);
        const Vector b = gaussian_matrix(rng, k, 1).col(0);
        std::vector<Vector> ts;
        for (int j = 0; j < m; ++j) {
            ts.push_back(gaussian_matrix(rng, k, 1).col(0));
        }
        Vector lo(p), hi(p);
        for (int j = 0; j < p; ++j) {
            lo(j) = -1.0 + 0.5 * u(rng);
            hi(j) = 1.0 + 0.5 * u(rng);
        }
        const auto space = ParameterSpace::box(lo, hi);
        const auto& vertices = space.vertices();
        Matrix payoff(m, static_cast<Eigen::Index>(vertices.size()));
        for (int j = 0; j < m; ++j) {
            for (std::size_t v = 0; v < vertices.size(); ++v) {
                payoff(j, static_cast<Eigen::Index>(v)) = ts[static_cast<std::size_t>(j)].dot(a * vertices[v] - b);
            }
        }
        const double sup_inf = oracles::game_value(payoff);

        RowMatrix rows(2, k * p + k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < p; ++j) {
                rows(0, i * p + j) = a(i, j);
            }
            rows(0, k * p + i) = b(i);
        }
        rows.row(1) = rows.row(0);
        const EmpiricalEvaluator ev(fixtures::bilinear_model(k, p), fixtures::dataset(rows),
                                    TestFunctionFamily::finite_family(ts));
        TuningPolicy unit;
        unit.r = Rate{1.0, 0.0};
        const double inf_sup = outer_inf(ev, space, unit, static_cast<std::uint64_t>(trial)).statistic;
        worst = std::max(worst, std::abs(inf_sup - sup_inf));
    }
    std::ostringstream s;
    s << "50 instances, worst |inf sup - sup inf| = " << worst;
    return {worst <= 1e-6, s.str()};
}

Outcome psi_consistency()
{
    Matrix a(3, 2);
    a << 1.0, 0.4, -0.3, 1.0, 0.6, 0.2;
    const std::vector<Vector> thetas{vec({0, 0}), vec({0.5, -0.5}), vec({-1, 0.7}), vec({1.2, 1}), vec({-0.4, -1.3})};
    std::vector<Vector> ts;
    for (int j = 0; j < 8; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / 8.0;
        ts.push_back(vec({std::cos(phi), std::sin(phi), 0.5 * std::cos(3.0 * phi)}));
    }
    const auto space = ParameterSpace::box(vec({-3, -3}), vec({3, 3}));
    std::vector<double> errors;
    for (std::size_t n : {250, 1000, 4000}) {
        const Dataset data = fixtures::bilinear_data(a, vec({0.2, -0.1}), n, 1.0, 77);
        const EmpiricalEvaluator ev(fixtures::bilinear_model(3, 2), data,
                                    TestFunctionFamily::weighted_ball(Matrix::Identity(3, 3)));
        PsiSurface surface(ev, space, std::pow(static_cast<double>(n), -0.25), 10.0);
        surface.set_closed_form(false);
        double worst = 0.0;
        for (const Vector& theta : thetas) {
            for (const Vector& t : ts) {
                const double gamma = -(a.transpose() * t).norm();
                worst = std::max(worst, std::abs(surface.psi_hat(theta, ev.family().element(t)) - gamma));
            }
        }
        errors.push_back(worst);
    }
    std::ostringstream s;
    s << "sup |psi_hat - gamma| at n = 250, 1000, 4000: " << errors[0] << ", " << errors[1] << ", " << errors[2];
    return {errors[0] > errors[1] && errors[1] > errors[2] && errors[2] < 0.1, s.str()};
}

Outcome size_control()
{
    TuningPolicy policy;
    policy.bootstrap_draws = 299;

    DgpSpec gmm;
    gmm.kind = DgpKind::linear_gmm;
    gmm.n = 500;
    gmm.seed = 606;
    const ExperimentResult g = size_power_experiment(gmm, 500, 0.05, Variant::plugin_K, policy);

    DgpSpec interval;
    interval.kind = DgpKind::interval_mean;
    interval.gap = 1.0;
    interval.n = 500;
    interval.seed = 607;
    const ExperimentResult i = size_power_experiment(interval, 500, 0.05, Variant::plugin_K, policy);

    std::ostringstream s;
    s << "linear-gmm rejection " << g.rejection_rate << " (excluded " << g.excluded << "), interval-mean rejection "
      << i.rejection_rate;
    const bool ok = g.rejection_rate >= 0.01 && g.rejection_rate <= 0.10 && i.rejection_rate <= 0.09;
    return {ok, s.str()};
}

Outcome power()
{
    TuningPolicy policy;
    policy.bootstrap_draws = 299;
    DgpSpec spec;
    spec.kind = DgpKind::interval_mean;
    spec.gap = 0.0;
    spec.crossing = 0.5; // unit variances, so 0.5 pooled sd
    spec.n = 500;
    spec.seed = 707;
    const ExperimentResult r = size_power_experiment(spec, 200, 0.05, Variant::plugin_K, policy);
    std::ostringstream s;
    s << "rejection " << r.rejection_rate << " over " << r.reps << " replications";
    return {r.rejection_rate >= 0.5, s.str()};
}

Outcome u_n_equality()
{
    Matrix a(4, 2);
    a << 1.0, 0.5, -0.2, 1.0, 0.3, 0.3, 0.8, -0.6;
    const std::size_t n = 300;
    const Vector theta0 = vec({0.4, -0.2});
    const Dataset data = fixtures::bilinear_data(a, theta0, n, 0.5, 808, true);
    const EmpiricalEvaluator ev(fixtures::bilinear_model(4, 2), data,
                                TestFunctionFamily::weighted_ball(Matrix::Identity(4, 4)));
    const Matrix jac = jacobian(ev, theta0).matrix;
    const MomentSnapshot s0 = ev.snapshot(theta0);
    double worst = 0.0;
    for (std::uint64_t b = 0; b < 50; ++b) {
        const auto draw = MultiplierDraw::generate(n, MultiplierKind::gaussian, 809, b);
        const Vector w = ev.multiplier_moment(s0, draw);
        const LocalProbe probe{w, jac, FinitelyGeneratedCone::subspace(Matrix::Identity(2, 2))};
        const double u = u_n_bound({probe}, ev.family());
        const double h = hilbert_upper_bound({w}, {jac});
        worst = std::max(worst, std::abs(u - h));
    }
    std::ostringstream s;
    s << "50 draws, worst |u_n - hilbert| = " << worst;
    return {worst <= 1e-4, s.str()};
}

Outcome projector_algebra()
{
    std::mt19937_64 rng(909);
    double idem = 0.0;
    double annihilate = 0.0;
    int trace_failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        const int p = 1 + static_cast<int>(rng() % 3);
        Matrix j = gaussian_matrix(rng, k, p);
        if (trial % 4 == 0 && p > 1) {
            j.col(p - 1) = 2.0 * j.col(0); // rank deficient
        }
        const Matrix m = k_projector(j);
        idem = std::max(idem, (m * m - m).cwiseAbs().maxCoeff());
        annihilate = std::max(annihilate, (m * j).cwiseAbs().maxCoeff());
        Eigen::JacobiSVD<Matrix> svd(j);
        svd.setThreshold(1e-10);
        const auto rank = svd.rank();
        trace_failures += std::abs(m.trace() - static_cast<double>(k - rank)) > 1e-10 ? 1 : 0;
    }
    std::ostringstream s;
    s << "max |M^2 - M| = " << idem << ", max |M J| = " << annihilate << ", trace mismatches " << trace_failures;
    return {idem <= 1e-10 && annihilate <= 1e-10 && trace_failures == 0, s.str()};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"chi-square null distribution", chi_square_null},
        {"cone distance duality", cone_duality},
        {"local bound inequality", proposition_one},
        {"minimax exchange", minimax_exchange},
        {"psi_hat consistency", psi_consistency},
        {"bootstrap size control", size_control},
        {"power with empty identified set", power},
        {"U_n equality", u_n_equality},
        {"projector algebra", projector_algebra},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), seconds);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
