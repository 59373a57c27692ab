#pragma once

#include "pitest/types.hpp"

#include <functional>

namespace pitest {

using Objective = std::function<double(const Vector&)>;
using Projector = std::function<Vector(const Vector&)>;

struct SimplexOptions {
    double initial_step = 0.1;
    double value_tol = 1e-8;
    double point_tol = 1e-9;
    int max_evaluations = 4000;
    /// Fresh simplexes built at the incumbent after convergence; stops
    /// early once a rebuild brings no improvement beyond value_tol.
    int rebuilds = 4;
};

struct SimplexResult {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/**
 * Nelder-Mead simplex-reflection descent with every trial point projected
 * onto the feasible set. Nonsmooth objectives are handled by rebuilding
 * the simplex around the incumbent after each convergence.
 */
SimplexResult projected_simplex_descent(const Objective& f, const Projector& project,
                                        const Vector& start, const SimplexOptions& options = {});

} // namespace pitest
