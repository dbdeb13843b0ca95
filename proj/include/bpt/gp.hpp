#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "bpt/kernels.hpp"
#include "bpt/rng.hpp"

namespace bpt {

struct PosteriorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Approximate prior/posterior function draw built from random Fourier
// features. Deterministic given its seed; evaluating the same point twice
// returns the same value.
class RffSampler {
 public:
  double operator()(const Eigen::VectorXd& p) const;
  Eigen::VectorXd eval(const Eigen::MatrixXd& points) const;

 private:
  friend class GpModel;
  Eigen::MatrixXd frequencies_;  // num_features x dim
  Eigen::VectorXd phases_;       // num_features
  Eigen::VectorXd weights_;      // num_features
  double scale_ = 0.0;           // sqrt(2 * signal_variance / num_features)
  double prior_mean_ = 0.0;
};

// Exact GP over the joint space. Observations are added one at a time through
// a rank-one extension of the lower Cholesky factor of K + sigma^2 I; a batch
// rebuild runs only when jitter has to be escalated (or for refits).
//
// An optional grid cache keeps posterior mean/variance over a fixed point set
// up to date in O(t * grid) per added observation, which is what the
// acquisition loops iterate over every step.
class GpModel {
 public:
  GpModel(KernelSpec kernel, double noise_variance);
  GpModel(KernelSpec kernel, double noise_variance,
          const Eigen::MatrixXd& points, const Eigen::VectorXd& values);

  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  Eigen::Index num_observations() const { return values_.size(); }
  const Eigen::MatrixXd& history_points() const { return points_; }
  const Eigen::VectorXd& history_values() const { return values_; }
  double jitter() const { return jitter_; }

  void add_observation(const Eigen::VectorXd& p, double y);
  GpModel conditioned(const Eigen::VectorXd& p, double y) const;

  PosteriorMoments predict(const Eigen::VectorXd& p) const;
  void predict_many(const Eigen::MatrixXd& points, Eigen::VectorXd* mean,
                    Eigen::VectorXd* variance) const;

  double posterior_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // Posterior covariance of the latent function over `points` (no noise term).
  Eigen::MatrixXd posterior_cov_matrix(const Eigen::MatrixXd& points) const;

  // One joint draw over `points`; consumes points.rows() normals from `rng`.
  Eigen::VectorXd sample_on_grid(const Eigen::MatrixXd& points, Rng& rng) const;

  RffSampler sample_rff(int num_features, std::uint64_t seed) const;

  double log_marginal_likelihood() const;

  // Grid cache -------------------------------------------------------------
  void attach_grid(const Eigen::MatrixXd& points);
  bool has_grid() const { return grid_points_.rows() > 0; }
  const Eigen::MatrixXd& grid_points() const { return grid_points_; }
  const Eigen::VectorXd& grid_mean() const { return grid_mean_; }
  const Eigen::VectorXd& grid_var() const { return grid_var_; }
  double grid_cov(Eigen::Index i, Eigen::Index j) const;

 private:
  void rebuild(double jitter);
  void extend_factor(const Eigen::VectorXd& p, double y);
  void refresh_grid_cache();
  double base_jitter() const { return 1e-10 * kernel_.signal_variance; }
  double max_jitter() const { return 1e-4 * kernel_.signal_variance; }

  KernelSpec kernel_;
  double noise_variance_ = 0.0;
  Eigen::MatrixXd points_;  // t x dim
  Eigen::VectorXd values_;  // t
  Eigen::MatrixXd chol_;    // t x t lower factor of K + (sigma^2 + jitter) I
  Eigen::VectorXd beta_;    // chol^{-1} (y - prior_mean)
  double jitter_ = 0.0;

  Eigen::MatrixXd grid_points_;
  Eigen::MatrixXd grid_proj_;  // t x G, chol^{-1} K(history, grid)
  Eigen::VectorXd grid_mean_;
  Eigen::VectorXd grid_var_;
};

// Hyperparameter search box (log-uniform starts inside these bounds).
struct HyperBounds {
  double lengthscale_min = 1e-3;
  double lengthscale_max = 1e3;
  double signal_variance_min = 1e-6;
  double signal_variance_max = 1e6;
  double noise_variance_min = 1e-8;
  double noise_variance_max = 1e2;

  void validate() const;
};

struct HyperFit {
  KernelSpec kernel;
  double noise_variance = 0.0;
  double log_marginal = 0.0;
};

// Multi-start coordinate search over log-parameters. The incumbent spec is
// always a candidate, so the returned fit never has lower evidence than the
// model it started from.
HyperFit fit_hyperparameters(const GpModel& model, const HyperBounds& bounds,
                             int num_starts = 8, std::uint64_t seed = 0);

}  // namespace bpt
