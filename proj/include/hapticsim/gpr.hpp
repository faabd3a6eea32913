#pragma once

// Exact Gaussian process regression on the plane with a squared-exponential
// covariance and a zero prior mean.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"

namespace hapticsim {

struct GprHyper {
    double signal_variance = 1.0;  // sigma_f^2
    double length_scale = 5.0;     // mm
    double noise_variance = 0.0;   // sigma_y^2

    void validate() const {
        if (!(signal_variance > 0.0) || !(length_scale > 0.0) || !(noise_variance >= 0.0) ||
            !std::isfinite(signal_variance) || !std::isfinite(length_scale) || !std::isfinite(noise_variance))
            throw ConfigError("GPR hyperparameters must be finite with sigma_f^2, length > 0 and sigma_y^2 >= 0");
    }
};

class GprModel {
public:
    GprModel(std::span<const Vec2> inputs, std::span<const double> targets, const GprHyper& hyper)
        : hyper_(hyper), inputs_(inputs.begin(), inputs.end()) {
        hyper.validate();
        if (inputs.empty()) throw ConfigError("GPR needs at least one sample");
        if (inputs.size() != targets.size()) throw ConfigError("GPR inputs and targets differ in length");
        const auto n = static_cast<Eigen::Index>(inputs.size());
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (!std::isfinite(targets[k]) || !std::isfinite(inputs[k].x) || !std::isfinite(inputs[k].y))
                throw NumericalError("GPR sample " + std::to_string(k) + " is not finite");
            y(i) = targets[k];
        }

        Eigen::MatrixXd gram(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = j; i < n; ++i) {
                const double v = kernel(inputs_[static_cast<std::size_t>(i)], inputs_[static_cast<std::size_t>(j)]);
                gram(i, j) = v;
                gram(j, i) = v;
            }
            gram(j, j) += hyper_.noise_variance;
        }

        llt_.compute(gram);
        double added = 0.0;
        for (double jitter = 1e-12 * hyper_.signal_variance; llt_.info() != Eigen::Success; jitter *= 10.0) {
            if (jitter > 1e-6 * hyper_.signal_variance * (1.0 + 1e-9))
                throw NumericalError("GPR covariance is not positive definite even with jitter " +
                                     std::to_string(added));
            gram.diagonal().array() += jitter - added;
            added = jitter;
            llt_.compute(gram);
        }
        jitter_ = added;
        alpha_ = llt_.solve(y);
    }

    double kernel(Vec2 a, Vec2 b) const {
        return hyper_.signal_variance * std::exp(-0.5 * norm2(a - b) / (hyper_.length_scale * hyper_.length_scale));
    }

    double mean(Vec2 p) const {
        const double inv = 0.5 / (hyper_.length_scale * hyper_.length_scale);
        double m = 0.0;
        for (std::size_t i = 0; i < inputs_.size(); ++i)
            m += alpha_(static_cast<Eigen::Index>(i)) * std::exp(-norm2(p - inputs_[i]) * inv);
        return hyper_.signal_variance * m;
    }

    /// Posterior variance of the latent function at p.
    double variance(Vec2 p) const {
        Eigen::VectorXd k(static_cast<Eigen::Index>(inputs_.size()));
        for (std::size_t i = 0; i < inputs_.size(); ++i) k(static_cast<Eigen::Index>(i)) = kernel(p, inputs_[i]);
        const Eigen::VectorXd v = llt_.matrixL().solve(k);
        return std::max(0.0, hyper_.signal_variance - v.squaredNorm());
    }

    /// Posterior mean on every node of `grid`.
    ScalarGrid mean(const GridSpec& grid) const {
        ScalarGrid out(grid);
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t i = 0; i < grid.nx; ++i) out.at(i, j) = mean(grid.node(i, j));
        return out;
    }

    const GprHyper& hyper() const { return hyper_; }
    std::size_t size() const { return inputs_.size(); }
    double jitter() const { return jitter_; }

private:
    GprHyper hyper_;
    std::vector<Vec2> inputs_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

}  // namespace hapticsim
