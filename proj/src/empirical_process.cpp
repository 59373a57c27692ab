#include "pitest/empirical_process.hpp"

#include <cmath>
#include <random>

namespace pitest {

MultiplierDraw MultiplierDraw::generate(std::size_t n, MultiplierKind kind, std::uint64_t seed,
                                        std::uint64_t index)
{
    MultiplierDraw d;
    d.kind = kind;
    d.seed = seed;
    d.index = index;
    d.xi.resize(static_cast<Eigen::Index>(n));
    std::mt19937_64 rng(derive_seed(seed, index));
    if (kind == MultiplierKind::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& x : d.xi) {
            x = normal(rng);
        }
    } else {
        std::bernoulli_distribution coin(0.5);
        for (auto& x : d.xi) {
            x = coin(rng) ? 1.0 : -1.0;
        }
    }
    return d;
}

MultiplierDraw MultiplierDraw::zeros(std::size_t n)
{
    MultiplierDraw d;
    d.xi = Vector::Zero(static_cast<Eigen::Index>(n));
    return d;
}

EmpiricalEvaluator::EmpiricalEvaluator(MomentModel model, Dataset data, TestFunctionFamily family)
    : model_(std::move(model)), data_(std::move(data)), family_(std::move(family))
{
    if (family_.moment_dim() != model_.k()) {
        throw ConfigError("test-function family dimension " + std::to_string(family_.moment_dim()) +
                          " does not match moment dimension " + std::to_string(model_.k()));
    }
    for (auto c : family_.instrument_columns()) {
        if (c >= data_.d()) {
            throw ConfigError("instrument column index out of range");
        }
    }
    if (model_.is_affine()) {
        const auto n = static_cast<Eigen::Index>(data_.n());
        const int k = model_.k();
        const int p = model_.p();
        slopes_.resize(n, k * p);
        offsets_.resize(n, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const AffineRow a = model_.affine_row(data_.row(static_cast<std::size_t>(i)));
            if (!a.slope.allFinite() || !a.offset.allFinite()) {
                throw DataError("non-finite moment value at row " + std::to_string(i), static_cast<long>(i));
            }
            for (int r = 0; r < k; ++r) {
                for (int c = 0; c < p; ++c) {
                    slopes_(i, r * p + c) = a.slope(r, c);
                }
            }
            offsets_.row(i) = a.offset.transpose();
        }
        const Vector s = slopes_.colwise().mean().transpose();
        mean_slope_ = Eigen::Map<const RowMatrix>(s.data(), k, p);
        mean_offset_ = offsets_.colwise().mean().transpose();
    }
}

MomentSnapshot EmpiricalEvaluator::snapshot(const Vector& theta) const
{
    if (theta.size() != p()) {
        throw ConfigError("parameter dimension mismatch");
    }
    const auto n = static_cast<Eigen::Index>(data_.n());
    MomentSnapshot s;
    s.theta = theta;
    s.values.resize(n, k());
    if (model_.is_affine()) {
        const int k = model_.k();
        const int p = model_.p();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Map<const RowMatrix> g(slopes_.row(i).data(), k, p);
            s.values.row(i) = (g * theta).transpose() + offsets_.row(i);
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector g = model_.moment(data_.row(static_cast<std::size_t>(i)), theta);
            if (!g.allFinite()) {
                throw DataError("non-finite moment value at row " + std::to_string(i), static_cast<long>(i));
            }
            s.values.row(i) = g.transpose();
        }
    }
    s.mean = s.values.colwise().mean().transpose();
    return s;
}

Vector EmpiricalEvaluator::mean_moment(const Vector& theta) const
{
    if (model_.is_affine()) {
        if (theta.size() != p()) {
            throw ConfigError("parameter dimension mismatch");
        }
        return mean_slope_ * theta + mean_offset_;
    }
    return snapshot(theta).mean;
}

double EmpiricalEvaluator::v_n(const Vector& theta, const TestFunction& t) const
{
    if (family_.row_independent()) {
        return family_.weight(t).dot(mean_moment(theta));
    }
    return v_n(snapshot(theta), t);
}

double EmpiricalEvaluator::v_n(const MomentSnapshot& s, const TestFunction& t) const
{
    if (family_.row_independent()) {
        return family_.weight(t).dot(s.mean);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < data_.n(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        acc += family_.weight(t, data_.row(i)).dot(s.values.row(idx).transpose());
    }
    return acc / static_cast<double>(data_.n());
}

std::optional<AffineForm> EmpiricalEvaluator::linearize(const TestFunction& t) const
{
    if (!model_.is_affine()) {
        return std::nullopt;
    }
    AffineForm a;
    if (family_.row_independent()) {
        const Vector w = family_.weight(t);
        a.slope = mean_slope_.transpose() * w;
        a.offset = w.dot(mean_offset_);
        return a;
    }
    const int k = model_.k();
    const int p = model_.p();
    a.slope = Vector::Zero(p);
    for (std::size_t i = 0; i < data_.n(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const Vector w = family_.weight(t, data_.row(i));
        const Eigen::Map<const RowMatrix> g(slopes_.row(idx).data(), k, p);
        a.slope += g.transpose() * w;
        a.offset += w.dot(offsets_.row(idx).transpose());
    }
    const double inv = 1.0 / static_cast<double>(data_.n());
    a.slope *= inv;
    a.offset *= inv;
    return a;
}

void EmpiricalEvaluator::check_draw(const MultiplierDraw& draw) const
{
    if (static_cast<std::size_t>(draw.xi.size()) != data_.n()) {
        throw ConfigError("multiplier draw length " + std::to_string(draw.xi.size()) +
                          " does not match sample size " + std::to_string(data_.n()));
    }
}

Vector EmpiricalEvaluator::multiplier_moment(const MomentSnapshot& s, const MultiplierDraw& draw) const
{
    check_draw(draw);
    const double scale = 1.0 / std::sqrt(static_cast<double>(data_.n()));
    return scale * (s.values.transpose() * draw.xi - draw.xi.sum() * s.mean);
}

AffineRow EmpiricalEvaluator::multiplier_affine(const MultiplierDraw& draw) const
{
    if (!model_.is_affine()) {
        throw ConfigError("multiplier_affine requires an affine model");
    }
    check_draw(draw);
    const double scale = 1.0 / std::sqrt(static_cast<double>(data_.n()));
    const double xsum = draw.xi.sum();
    const Vector s = slopes_.transpose() * draw.xi;
    AffineRow a;
    a.slope = scale * (Eigen::Map<const RowMatrix>(s.data(), k(), p()) - xsum * mean_slope_);
    a.offset = scale * (offsets_.transpose() * draw.xi - xsum * mean_offset_);
    return a;
}

double EmpiricalEvaluator::multiplier_process(const MomentSnapshot& s, const TestFunction& t,
                                              const MultiplierDraw& draw) const
{
    check_draw(draw);
    if (family_.row_independent()) {
        return family_.weight(t).dot(multiplier_moment(s, draw));
    }
    const double v = v_n(s, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < data_.n(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double pairing = family_.weight(t, data_.row(i)).dot(s.values.row(idx).transpose());
        acc += draw.xi(idx) * (pairing - v);
    }
    return acc / std::sqrt(static_cast<double>(data_.n()));
}

double v_n(const EmpiricalEvaluator& evaluator, const Vector& theta, const TestFunction& t)
{
    return evaluator.v_n(theta, t);
}

double multiplier_process(const EmpiricalEvaluator& evaluator, const Vector& theta,
                          const TestFunction& t, const MultiplierDraw& draw)
{
    return evaluator.multiplier_process(evaluator.snapshot(theta), t, draw);
}

} // namespace pitest
