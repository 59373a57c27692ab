#include "pitest/simplex_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pitest {

namespace {

struct Vertex {
    Vector x;
    double f;
};

bool lex_less(const Vector& a, const Vector& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) {
            return a(i) < b(i);
        }
    }
    return false;
}

bool vertex_less(const Vertex& a, const Vertex& b)
{
    if (a.f != b.f) {
        return a.f < b.f;
    }
    return lex_less(a.x, b.x);
}

} // namespace

SimplexResult projected_simplex_descent(const Objective& f, const Projector& project,
                                        const Vector& start, const SimplexOptions& options)
{
    const auto p = start.size();
    SimplexResult result;
    int evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    Vertex best{project(start), 0.0};
    best.f = eval(best.x);
    double step = options.initial_step;
    bool converged = false;

    for (int round = 0; round <= options.rebuilds; ++round) {
        std::vector<Vertex> simplex;
        simplex.reserve(static_cast<std::size_t>(p + 1));
        simplex.push_back(best);
        for (Eigen::Index i = 0; i < p; ++i) {
            Vector x = best.x;
            x(i) += step;
            Vector y = project(x);
            if ((y - best.x).norm() < 0.5 * step) {
                // pinned against the boundary: step the other way
                x = best.x;
                x(i) -= step;
                y = project(x);
            }
            simplex.push_back({y, eval(y)});
        }

        converged = false;
        while (evals < options.max_evaluations) {
            std::sort(simplex.begin(), simplex.end(), vertex_less);
            const double spread = simplex.back().f - simplex.front().f;
            double diameter = 0.0;
            for (std::size_t j = 1; j < simplex.size(); ++j) {
                diameter = std::max(diameter, (simplex[j].x - simplex[0].x).cwiseAbs().maxCoeff());
            }
            if ((spread <= options.value_tol && diameter <= options.point_tol * (1.0 + simplex[0].x.norm())) ||
                diameter == 0.0) {
                converged = true;
                break;
            }
            if (spread == 0.0 && diameter <= options.point_tol * 1e3 * (1.0 + simplex[0].x.norm())) {
                converged = true;
                break;
            }

            Vector centroid = Vector::Zero(p);
            for (std::size_t j = 0; j + 1 < simplex.size(); ++j) {
                centroid += simplex[j].x;
            }
            centroid /= static_cast<double>(p);
            Vertex& worst = simplex.back();

            const Vector xr = project(centroid + (centroid - worst.x));
            const double fr = eval(xr);
            if (fr < simplex.front().f) {
                const Vector xe = project(centroid + 2.0 * (centroid - worst.x));
                const double fe = eval(xe);
                worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
                continue;
            }
            if (fr < simplex[simplex.size() - 2].f) {
                worst = {xr, fr};
                continue;
            }
            const bool outside = fr < worst.f;
            const Vector xc = outside ? project(centroid + 0.5 * (xr - centroid))
                                      : project(centroid + 0.5 * (worst.x - centroid));
            const double fc = eval(xc);
            if ((outside && fc <= fr) || (!outside && fc < worst.f)) {
                worst = {xc, fc};
                continue;
            }
            for (std::size_t j = 1; j < simplex.size(); ++j) {
                simplex[j].x = project(simplex[0].x + 0.5 * (simplex[j].x - simplex[0].x));
                simplex[j].f = eval(simplex[j].x);
            }
        }
        std::sort(simplex.begin(), simplex.end(), vertex_less);
        const double previous = best.f;
        if (vertex_less(simplex.front(), best)) {
            best = simplex.front();
        }
        if (evals >= options.max_evaluations) {
            break;
        }
        if (round > 0 && previous - best.f <= options.value_tol) {
            break;
        }
        // rebuild smaller around the incumbent
        step = std::max(step * 0.1, 1e-3 * options.initial_step);
    }

    result.x = best.x;
    result.value = best.f;
    result.evaluations = evals;
    result.converged = converged;
    return result;
}

} // namespace pitest
