#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "moboga/errors.hpp"
#include "moboga/random.hpp"

namespace moboga {

inline constexpr double kNoiseFloor = 1e-10;

// Squared-exponential ARD hyperparameters. Variances are expressed in units of
// the standardized targets.
struct GpHyperParams {
    std::vector<double> length_scales;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;
};

struct FixedHyper {
    GpHyperParams hyper;
};

// Multi-start pattern search on the log marginal likelihood over
// log length-scales and log signal variance; the noise stays fixed.
struct MaximizeEvidence {
    std::uint64_t seed = 0;
    double noise_variance = 1e-6;
    int starts = 16;
    int max_steps = 200;
    double log_length_lo = std::log(0.05);
    double log_length_hi = std::log(2.0);
    double log_signal_lo = std::log(0.1);
    double log_signal_hi = std::log(10.0);
};

using HyperMode = std::variant<FixedHyper, MaximizeEvidence>;

struct Posterior {
    double mean;
    double sigma;
};

namespace detail {

inline void check_hyper(GpHyperParams const& h, std::size_t dim)
{
    if (h.length_scales.size() != dim) {
        throw ValidationError("expected " + std::to_string(dim) + " length-scales, got "
                              + std::to_string(h.length_scales.size()));
    }
    for (double l : h.length_scales) {
        if (!(std::isfinite(l) && l > 0.0)) {
            throw ValidationError("length-scales must be finite and positive");
        }
    }
    if (!(std::isfinite(h.signal_variance) && h.signal_variance > 0.0)) {
        throw ValidationError("signal variance must be finite and positive");
    }
    if (!(std::isfinite(h.noise_variance) && h.noise_variance >= kNoiseFloor)) {
        throw ValidationError("noise variance must be finite and at least the jitter floor");
    }
}

inline Eigen::MatrixXd gram(Eigen::MatrixXd const& X, GpHyperParams const& h)
{
    auto const n = X.rows();
    Eigen::ArrayXd inv_l(X.cols());
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        inv_l[k] = 1.0 / h.length_scales[static_cast<std::size_t>(k)];
    }
    Eigen::MatrixXd Z = X.array().rowwise() * inv_l.transpose();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = h.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            double const r2 = (Z.row(i) - Z.row(j)).squaredNorm();
            K(i, j) = K(j, i) = h.signal_variance * std::exp(-0.5 * r2);
        }
    }
    return K;
}

struct Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

// Cholesky of K + noise*I, escalating an extra diagonal jitter 1e-10 -> 1e-4.
inline std::optional<Factor> factorize(Eigen::MatrixXd K, double noise)
{
    K.diagonal().array() += noise;
    Factor f;
    f.llt.compute(K);
    if (f.llt.info() == Eigen::Success) {
        return f;
    }
    for (double jitter = 1e-10; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += jitter;
        f.llt.compute(Kj);
        if (f.llt.info() == Eigen::Success) {
            f.jitter = jitter;
            return f;
        }
    }
    return std::nullopt;
}

} // namespace detail

class GpModel;
inline GpModel gp_fit(std::span<std::vector<double> const> X, std::span<double const> y, HyperMode const& mode);

// Exact GP regression on standardized targets. Immutable after construction.
class GpModel {
  public:
    std::size_t size() const { return static_cast<std::size_t>(X_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(X_.cols()); }
    GpHyperParams const& hyper() const { return hyper_; }
    Eigen::MatrixXd const& train_inputs() const { return X_; }
    std::vector<double> const& train_targets() const { return y_; }
    double target_mean() const { return y_mean_; }
    double target_scale() const { return y_scale_; }
    double jitter() const { return jitter_; }
    double log_marginal_likelihood() const { return lml_; }

    // Predictive variance of the latent function in target units, before clipping at zero.
    double raw_variance(std::span<double const> x) const
    {
        Eigen::VectorXd v = cross(x);
        factor_.matrixL().solveInPlace(v);
        return (hyper_.signal_variance - v.squaredNorm()) * y_scale_ * y_scale_;
    }

    Posterior posterior(std::span<double const> x) const
    {
        Eigen::VectorXd k = cross(x);
        double const mu = y_mean_ + y_scale_ * k.dot(alpha_);
        factor_.matrixL().solveInPlace(k);
        double const var = hyper_.signal_variance - k.squaredNorm();
        return {mu, y_scale_ * std::sqrt(std::max(var, 0.0))};
    }

  private:
    friend GpModel gp_fit(std::span<std::vector<double> const>, std::span<double const>, HyperMode const&);

    Eigen::VectorXd cross(std::span<double const> x) const
    {
        if (x.size() != dim()) {
            throw ValidationError("query point has dimension " + std::to_string(x.size()) + ", model has "
                                  + std::to_string(dim()));
        }
        Eigen::VectorXd k(X_.rows());
        for (Eigen::Index i = 0; i < X_.rows(); ++i) {
            double r2 = 0.0;
            for (Eigen::Index d = 0; d < X_.cols(); ++d) {
                double const t = (x[static_cast<std::size_t>(d)] - X_(i, d)) / hyper_.length_scales[static_cast<std::size_t>(d)];
                r2 += t * t;
            }
            k[i] = hyper_.signal_variance * std::exp(-0.5 * r2);
        }
        return k;
    }

    Eigen::MatrixXd X_;
    std::vector<double> y_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    GpHyperParams hyper_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
    double lml_ = 0.0;
};

namespace detail {

inline double log_evidence(Eigen::LLT<Eigen::MatrixXd> const& llt, Eigen::VectorXd const& z, Eigen::VectorXd const& alpha)
{
    auto const n = static_cast<double>(z.size());
    double const logdet_half = llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * z.dot(alpha) - logdet_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

inline double evidence_at(Eigen::MatrixXd const& X, Eigen::VectorXd const& z, std::vector<double> const& theta, double noise)
{
    GpHyperParams h;
    h.length_scales.assign(theta.begin(), theta.end() - 1);
    for (double& l : h.length_scales) {
        l = std::exp(l);
    }
    h.signal_variance = std::exp(theta.back());
    h.noise_variance = noise;
    auto f = factorize(gram(X, h), noise);
    if (!f) {
        return -std::numeric_limits<double>::infinity();
    }
    Eigen::VectorXd alpha = f->llt.solve(z);
    return log_evidence(f->llt, z, alpha);
}

inline GpHyperParams maximize_evidence(Eigen::MatrixXd const& X, Eigen::VectorXd const& z, MaximizeEvidence const& opt)
{
    auto const d = static_cast<std::size_t>(X.cols());
    std::vector<double> lo(d + 1, opt.log_length_lo), hi(d + 1, opt.log_length_hi);
    lo[d] = opt.log_signal_lo;
    hi[d] = opt.log_signal_hi;

    Rng rng(opt.seed);
    std::vector<double> best_theta;
    double best = -std::numeric_limits<double>::infinity();

    for (int s = 0; s < std::max(1, opt.starts); ++s) {
        std::vector<double> theta(d + 1);
        for (std::size_t k = 0; k <= d; ++k) {
            // first start sits at the centre of the box, the rest are random
            theta[k] = s == 0 ? 0.5 * (lo[k] + hi[k]) : rng.uniform(lo[k], hi[k]);
        }
        double value = evidence_at(X, z, theta, opt.noise_variance);
        double step = 0.5;
        for (int it = 0; it < opt.max_steps && step >= 1e-3; ++it) {
            bool improved = false;
            for (std::size_t k = 0; k <= d; ++k) {
                for (double sign : {1.0, -1.0}) {
                    auto trial = theta;
                    trial[k] = std::clamp(theta[k] + sign * step, lo[k], hi[k]);
                    if (trial[k] == theta[k]) {
                        continue;
                    }
                    double const v = evidence_at(X, z, trial, opt.noise_variance);
                    if (v > value) {
                        value = v;
                        theta = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                step *= 0.5;
            }
        }
        if (value > best || best_theta.empty()) {
            best = value;
            best_theta = theta;
        }
    }

    GpHyperParams h;
    for (std::size_t k = 0; k < d; ++k) {
        h.length_scales.push_back(std::exp(best_theta[k]));
    }
    h.signal_variance = std::exp(best_theta[d]);
    h.noise_variance = opt.noise_variance;
    return h;
}

} // namespace detail

// Fits a GP to rows X (encoded points) and targets y.
inline GpModel gp_fit(std::span<std::vector<double> const> X, std::span<double const> y, HyperMode const& mode)
{
    if (X.empty()) {
        throw ValidationError("gp_fit needs at least one training point");
    }
    if (X.size() != y.size()) {
        throw ValidationError("gp_fit: " + std::to_string(X.size()) + " inputs but " + std::to_string(y.size()) + " targets");
    }
    auto const n = X.size();
    auto const d = X.front().size();
    if (d == 0) {
        throw ValidationError("gp_fit: inputs have zero dimension");
    }

    GpModel m;
    m.X_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        if (X[i].size() != d) {
            throw ValidationError("gp_fit: ragged input rows");
        }
        for (std::size_t k = 0; k < d; ++k) {
            if (!std::isfinite(X[i][k])) {
                throw ValidationError("gp_fit: non-finite input");
            }
            m.X_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = X[i][k];
        }
    }
    m.y_.assign(y.begin(), y.end());

    double mean = 0.0;
    for (double v : m.y_) {
        if (!std::isfinite(v)) {
            throw ValidationError("gp_fit: non-finite target");
        }
        mean += v;
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : m.y_) {
        var += (v - mean) * (v - mean);
    }
    double const sd = std::sqrt(var / static_cast<double>(n));
    m.y_mean_ = mean;
    m.y_scale_ = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;

    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        z[static_cast<Eigen::Index>(i)] = (m.y_[i] - m.y_mean_) / m.y_scale_;
    }

    if (auto const* fixed = std::get_if<FixedHyper>(&mode)) {
        detail::check_hyper(fixed->hyper, d);
        m.hyper_ = fixed->hyper;
    } else {
        m.hyper_ = detail::maximize_evidence(m.X_, z, std::get<MaximizeEvidence>(mode));
    }

    auto f = detail::factorize(detail::gram(m.X_, m.hyper_), m.hyper_.noise_variance);
    if (!f) {
        Eigen::MatrixXd K = detail::gram(m.X_, m.hyper_);
        K.diagonal().array() += m.hyper_.noise_variance;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
        std::ostringstream os;
        os << "GP Cholesky failed after jitter escalation to 1e-4 (n=" << n << ", eigenvalue range ["
           << es.eigenvalues().minCoeff() << ", " << es.eigenvalues().maxCoeff() << "], signal variance "
           << m.hyper_.signal_variance << ")";
        throw NumericalError(os.str());
    }
    m.factor_ = std::move(f->llt);
    m.jitter_ = f->jitter;
    m.alpha_ = m.factor_.solve(z);
    m.lml_ = detail::log_evidence(m.factor_, z, m.alpha_);
    return m;
}

} // namespace moboga
