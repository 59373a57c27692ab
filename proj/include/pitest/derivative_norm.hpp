#pragma once

#include "pitest/empirical_process.hpp"
#include "pitest/local_geometry.hpp"
#include "pitest/parameter_space.hpp"

namespace pitest {

struct JacobianEstimate {
    enum class Method { analytic, central_difference };

    Matrix matrix;
    Method method = Method::analytic;
    double step = 0.0; ///< largest coordinate step for central differences
};

/// Step h_i = max(1e-6, 1e-7 (1 + |theta_i|)) per coordinate.
JacobianEstimate central_difference_jacobian(const VectorPath& m, const Vector& theta);

/**
 * Jacobian of m_n at theta: analytic when the model supplies one (or is
 * affine), central differences otherwise. With a space, theta must be at
 * least one step inside it (PreconditionError otherwise).
 */
JacobianEstimate jacobian(const EmpiricalEvaluator& evaluator, const Vector& theta,
                          const ParameterSpace* space = nullptr);

/// Largest relative entrywise gap between the analytic and the
/// central-difference Jacobian of m_n (0 when no analytic one exists).
double check_jacobian(const EmpiricalEvaluator& evaluator, const Vector& theta);

/// gamma(theta, t) = -|grad m' w| for an interior theta, where w is the
/// pairing vector of t.
double linear_gamma(const Matrix& jacobian, const Vector& w);

enum class PsiMode { constrained, lagrangian };

struct PsiSolution {
    double value = 0.0;
    Vector argmin;
    bool closed_form = false; ///< found by the exact linear solve
};

/**
 * The estimated derivative norm
 *   psi_hat(theta, t) = inf_{theta' in Theta, |theta' - theta| <= delta}
 *                       (v_n(theta', t) - v_n(theta, t)) / delta
 * and its hinge-penalized relaxation psi_tilde over all of Theta.
 *
 * Affine models use exact linear solves when the delta-ball lies in Theta
 * or Theta is a box; set_closed_form(false) forces the simplex search.
 * Keeps a reference to the evaluator.
 */
class PsiSurface {
public:
    PsiSurface(const EmpiricalEvaluator& evaluator, ParameterSpace space, double delta, double nu,
               PsiMode mode = PsiMode::constrained);

    double delta() const noexcept { return delta_; }
    double nu() const noexcept { return nu_; }
    PsiMode mode() const noexcept { return mode_; }
    const ParameterSpace& space() const noexcept { return space_; }
    const EmpiricalEvaluator& evaluator() const noexcept { return *evaluator_; }

    void set_closed_form(bool enabled) noexcept { closed_form_ = enabled; }
    bool closed_form() const noexcept { return closed_form_; }

    PsiSolution solve_hat(const Vector& theta, const TestFunction& t) const;
    double psi_hat(const Vector& theta, const TestFunction& t) const;
    /// Throws ConfigError unless the model declares L_v < nu.
    double psi_tilde(const Vector& theta, const TestFunction& t) const;

    /// psi_hat or psi_tilde according to the mode.
    double operator()(const Vector& theta, const TestFunction& t) const;

private:
    std::optional<PsiSolution> exact_hat(const Vector& theta, const AffineForm& form) const;
    Vector project_local(const Vector& theta, const Vector& x) const;

    const EmpiricalEvaluator* evaluator_;
    ParameterSpace space_;
    double delta_;
    double nu_;
    PsiMode mode_;
    bool closed_form_ = true;
};

/// Orthonormal basis of the column space (modified Gram-Schmidt with
/// column pivoting, rank tolerance 1e-10 times the largest column norm).
Matrix column_basis(const Matrix& jacobian);

/// M = I - QQ', the projector onto the orthogonal complement of the
/// column space of the Jacobian. Exactly symmetric.
Matrix k_projector(const Matrix& jacobian);

/// inf over probes of |M_{grad m(theta)} residual(theta)|.
double hilbert_upper_bound(const std::vector<Vector>& residuals, const std::vector<Matrix>& jacobians);

} // namespace pitest
