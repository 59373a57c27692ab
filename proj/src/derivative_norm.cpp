#include "pitest/derivative_norm.hpp"

#include "pitest/simplex_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitest {

JacobianEstimate central_difference_jacobian(const VectorPath& m, const Vector& theta)
{
    JacobianEstimate out;
    out.method = JacobianEstimate::Method::central_difference;
    const Vector base = m(theta);
    out.matrix.resize(base.size(), theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = std::max(1e-6, 1e-7 * (1.0 + std::abs(theta(i))));
        out.step = std::max(out.step, h);
        Vector up = theta;
        Vector down = theta;
        up(i) += h;
        down(i) -= h;
        out.matrix.col(i) = (m(up) - m(down)) / (2.0 * h);
    }
    if (!out.matrix.allFinite()) {
        throw NumericalError("non-finite central-difference Jacobian");
    }
    return out;
}

namespace {

std::optional<Matrix> analytic_jacobian(const EmpiricalEvaluator& ev, const Vector& theta)
{
    if (ev.model().is_affine()) {
        return ev.mean_slope();
    }
    if (!ev.model().has_jacobian()) {
        return std::nullopt;
    }
    Matrix sum = Matrix::Zero(ev.k(), ev.p());
    for (std::size_t i = 0; i < ev.n(); ++i) {
        sum += ev.model().jacobian(ev.data().row(i), theta);
    }
    return Matrix(sum / static_cast<double>(ev.n()));
}

} // namespace

JacobianEstimate jacobian(const EmpiricalEvaluator& evaluator, const Vector& theta,
                          const ParameterSpace* space)
{
    if (theta.size() != evaluator.p()) {
        throw ConfigError("parameter dimension does not match the model");
    }
    if (auto exact = analytic_jacobian(evaluator, theta)) {
        return {std::move(*exact), JacobianEstimate::Method::analytic, 0.0};
    }
    if (space != nullptr) {
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            const double h = std::max(1e-6, 1e-7 * (1.0 + std::abs(theta(i))));
            for (double s : {-h, h}) {
                Vector x = theta;
                x(i) += s;
                if (!space->contains(x)) {
                    throw PreconditionError("theta is within one difference step of the boundary");
                }
            }
        }
    }
    return central_difference_jacobian([&](const Vector& x) { return evaluator.mean_moment(x); }, theta);
}

double check_jacobian(const EmpiricalEvaluator& evaluator, const Vector& theta)
{
    const auto exact = analytic_jacobian(evaluator, theta);
    if (!exact) {
        return 0.0;
    }
    const Matrix fd =
        central_difference_jacobian([&](const Vector& x) { return evaluator.mean_moment(x); }, theta).matrix;
    const double scale = std::max(1.0, exact->cwiseAbs().maxCoeff());
    return (fd - *exact).cwiseAbs().maxCoeff() / scale;
}

double linear_gamma(const Matrix& jacobian, const Vector& w)
{
    return -(jacobian.transpose() * w).norm();
}

PsiSurface::PsiSurface(const EmpiricalEvaluator& evaluator, ParameterSpace space, double delta, double nu,
                       PsiMode mode)
    : evaluator_(&evaluator), space_(std::move(space)), delta_(delta), nu_(nu), mode_(mode)
{
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
        throw ConfigError("δ_n must be positive and finite");
    }
    if (space_.dim() != evaluator.p()) {
        throw ConfigError("parameter space dimension does not match the model");
    }
    if (mode_ == PsiMode::lagrangian) {
        const auto lip = evaluator.model().lipschitz();
        if (!lip) {
            throw ConfigError("the Lagrangian form needs a declared Lipschitz bound L_v");
        }
        if (!(nu_ > *lip)) {
            throw ConfigError("ν_n must exceed the Lipschitz bound L_v");
        }
    }
}

namespace {

bool ball_inside(const ParameterSpace& space, const Vector& theta, double delta)
{
    switch (space.kind()) {
    case ParameterSpace::Kind::box:
        return ((theta.array() - delta) >= space.lower().array()).all() &&
               ((theta.array() + delta) <= space.upper().array()).all();
    case ParameterSpace::Kind::ball:
        return (theta - space.center()).norm() + delta <= space.radius();
    case ParameterSpace::Kind::polytope: {
        const Halfspaces h = space.halfspaces();
        const Vector reach = h.normals * theta + delta * h.normals.rowwise().norm();
        return (reach.array() <= h.offsets.array()).all();
    }
    }
    return false;
}

} // namespace

// min a'h over |h| <= delta and the box shifted by theta: h_i = clamp(-s a_i)
// with s found by bisection so that |h| = delta (or s = inf if the box binds).
std::optional<PsiSolution> PsiSurface::exact_hat(const Vector& theta, const AffineForm& form) const
{
    const Vector& a = form.slope;
    const double norm = a.norm();
    if (norm == 0.0) {
        return PsiSolution{0.0, theta, true};
    }
    if (ball_inside(space_, theta, delta_)) {
        return PsiSolution{-norm, theta - a * (delta_ / norm), true};
    }
    if (space_.kind() != ParameterSpace::Kind::box) {
        return std::nullopt;
    }
    const Vector lo = space_.lower() - theta;
    const Vector hi = space_.upper() - theta;
    auto step = [&](double s) {
        return Vector((-s * a).cwiseMax(lo).cwiseMin(hi));
    };
    const Vector corner = (a.array() > 0.0).select(lo, Vector((a.array() < 0.0).select(hi, Vector::Zero(a.size()))));
    Vector h;
    if (corner.norm() <= delta_) {
        h = corner;
    } else {
        double s_lo = 0.0;
        double s_hi = delta_ / norm;
        while (step(s_hi).norm() < delta_) {
            s_hi *= 2.0;
        }
        for (int it = 0; it < 200 && s_hi - s_lo > 1e-16 * s_hi; ++it) {
            const double mid = 0.5 * (s_lo + s_hi);
            (step(mid).norm() < delta_ ? s_lo : s_hi) = mid;
        }
        h = step(s_lo);
    }
    if (a.dot(h) >= 0.0) {
        return PsiSolution{0.0, theta, true};
    }
    return PsiSolution{a.dot(h) / delta_, theta + h, true};
}

Vector PsiSurface::project_local(const Vector& theta, const Vector& x) const
{
    auto to_ball = [&](const Vector& y) {
        const Vector d = y - theta;
        const double r = d.norm();
        return r <= delta_ ? y : Vector(theta + d * (delta_ / r));
    };
    if (ball_inside(space_, theta, delta_)) {
        return to_ball(x);
    }
    if (space_.dim() == 1) {
        const double lo = std::max(space_.lower()(0), theta(0) - delta_);
        const double hi = std::min(space_.upper()(0), theta(0) + delta_);
        return Vector::Constant(1, std::clamp(x(0), lo, hi));
    }
    // Dykstra between Theta and the delta-ball
    Vector y = x;
    Vector p = Vector::Zero(x.size());
    Vector q = Vector::Zero(x.size());
    for (int sweep = 0; sweep < 2000; ++sweep) {
        const Vector a = space_.project(y + p);
        p = y + p - a;
        const Vector b = to_ball(a + q);
        q = a + q - b;
        const double change = (b - y).cwiseAbs().maxCoeff();
        y = b;
        if (change <= 1e-14 * (1.0 + delta_)) {
            break;
        }
    }
    return y;
}

PsiSolution PsiSurface::solve_hat(const Vector& theta, const TestFunction& t) const
{
    const auto& ev = *evaluator_;
    if (theta.size() != ev.p()) {
        throw ConfigError("parameter dimension does not match the model");
    }
    const auto form = ev.linearize(t);
    if (closed_form_ && form) {
        if (auto exact = exact_hat(theta, *form)) {
            return *exact;
        }
    }

    Objective f;
    if (form) {
        const double base = form->slope.dot(theta);
        f = [form, base, this](const Vector& x) { return (form->slope.dot(x) - base) / delta_; };
    } else {
        const double base = ev.v_n(theta, t);
        f = [&ev, &t, base, this](const Vector& x) { return (ev.v_n(x, t) - base) / delta_; };
    }
    const Projector project = [&](const Vector& x) { return project_local(theta, x); };

    SimplexOptions options;
    options.initial_step = 0.5 * delta_;
    options.value_tol = 1e-12;
    options.point_tol = 1e-11 * delta_;
    PsiSolution best{0.0, theta};
    for (int s = 0; s <= 2 * ev.p(); ++s) {
        Vector start = theta;
        if (s > 0) {
            start((s - 1) / 2) += (s % 2 == 1 ? delta_ : -delta_);
            start = project(start);
        }
        const auto run = projected_simplex_descent(f, project, start, options);
        if (run.value < best.value) {
            best = {run.value, run.x};
        }
    }
    return best;
}

double PsiSurface::psi_hat(const Vector& theta, const TestFunction& t) const
{
    return solve_hat(theta, t).value;
}

double PsiSurface::psi_tilde(const Vector& theta, const TestFunction& t) const
{
    const auto& ev = *evaluator_;
    const auto lip = ev.model().lipschitz();
    if (!lip) {
        throw ConfigError("the Lagrangian form needs a declared Lipschitz bound L_v");
    }
    if (!(nu_ > *lip)) {
        throw ConfigError("ν_n must exceed the Lipschitz bound L_v");
    }
    const PsiSolution hat = solve_hat(theta, t);
    const auto form = ev.linearize(t);
    // beyond the ball the hinge grows faster than a linear v can fall
    if (closed_form_ && form && form->slope.norm() < nu_ && hat.closed_form) {
        return hat.value;
    }

    Objective f;
    const double base = form ? form->slope.dot(theta) : ev.v_n(theta, t);
    auto value = [&ev, &t, form](const Vector& x) {
        return form ? form->slope.dot(x) : ev.v_n(x, t);
    };
    f = [&, base](const Vector& x) {
        const double hinge = std::max((x - theta).norm() - delta_, 0.0);
        return (value(x) - base) / delta_ + nu_ * hinge / delta_;
    };
    const Projector project = [&](const Vector& x) { return space_.project(x); };

    SimplexOptions options;
    options.initial_step = 0.5 * delta_;
    options.value_tol = 1e-12;
    options.point_tol = 1e-11 * delta_;
    std::vector<Vector> starts{theta, hat.argmin};
    for (int s = 0; s < 2 * ev.p(); ++s) {
        Vector x = theta;
        x(s / 2) += (s % 2 == 0 ? delta_ : -delta_);
        starts.push_back(project(x));
    }
    double best = hat.value;
    for (const auto& start : starts) {
        best = std::min(best, projected_simplex_descent(f, project, start, options).value);
    }
    return best;
}

double PsiSurface::operator()(const Vector& theta, const TestFunction& t) const
{
    return mode_ == PsiMode::constrained ? psi_hat(theta, t) : psi_tilde(theta, t);
}

Matrix column_basis(const Matrix& jacobian)
{
    const auto k = jacobian.rows();
    Matrix work = jacobian;
    const double scale = work.rows() > 0 && work.cols() > 0 ? work.colwise().norm().maxCoeff() : 0.0;
    const double tol = 1e-10 * scale;
    std::vector<Vector> basis;
    std::vector<bool> used(static_cast<std::size_t>(work.cols()), false);
    while (scale > 0.0 && static_cast<Eigen::Index>(basis.size()) < std::min(k, work.cols())) {
        Eigen::Index pivot = -1;
        double largest = tol;
        for (Eigen::Index j = 0; j < work.cols(); ++j) {
            const double r = work.col(j).norm();
            if (!used[static_cast<std::size_t>(j)] && r > largest) {
                largest = r;
                pivot = j;
            }
        }
        if (pivot < 0) {
            break;
        }
        used[static_cast<std::size_t>(pivot)] = true;
        Vector q = work.col(pivot) / largest;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                q -= b.dot(q) * b;
            }
            q.normalize();
        }
        for (Eigen::Index j = 0; j < work.cols(); ++j) {
            if (!used[static_cast<std::size_t>(j)]) {
                work.col(j) -= q.dot(work.col(j)) * q;
            }
        }
        basis.push_back(std::move(q));
    }
    Matrix out(k, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = basis[j];
    }
    return out;
}

Matrix k_projector(const Matrix& jacobian)
{
    const Matrix q = column_basis(jacobian);
    const auto k = jacobian.rows();
    Matrix m = Matrix::Identity(k, k) - q * q.transpose();
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i + 1; j < k; ++j) {
            m(j, i) = m(i, j);
        }
    }
    return m;
}

double hilbert_upper_bound(const std::vector<Vector>& residuals, const std::vector<Matrix>& jacobians)
{
    if (residuals.empty() || residuals.size() != jacobians.size()) {
        throw ConfigError("need one Jacobian per residual probe");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        best = std::min(best, (k_projector(jacobians[i]) * residuals[i]).norm());
    }
    return best;
}

} // namespace pitest
