#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bpt {

// Finite design grid, environment grid, and normalized environment weights.
// Joint points are indexed design-major: joint_index(xi, wi) = xi * |env| + wi.
struct GridDomain {
  Eigen::MatrixXd design_points;  // num_design x design_dim
  Eigen::MatrixXd env_points;     // num_env x env_dim
  Eigen::VectorXd env_weights;    // sums to 1

  Eigen::Index num_design() const { return design_points.rows(); }
  Eigen::Index num_env() const { return env_points.rows(); }
  Eigen::Index design_dim() const { return design_points.cols(); }
  Eigen::Index env_dim() const { return env_points.cols(); }
  Eigen::Index num_joint() const { return num_design() * num_env(); }

  Eigen::Index joint_index(Eigen::Index xi, Eigen::Index wi) const {
    return xi * num_env() + wi;
  }

  Eigen::VectorXd joint_point(Eigen::Index xi, Eigen::Index wi) const;
  Eigen::MatrixXd joint_grid() const;

  Eigen::VectorXd env_mean() const;
  Eigen::Index nearest_env_index(const Eigen::VectorXd& w) const;

  // Throws ConfigError on empty grids, duplicate points, or unnormalized
  // weights.
  void validate() const;
};

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n);

// Cartesian product of per-dimension axes, first axis varying slowest.
Eigen::MatrixXd product_grid(const std::vector<Eigen::VectorXd>& axes);

// Normalizes nonnegative raw weights to sum 1; throws ConfigError if the
// total mass is zero or any entry is negative.
Eigen::VectorXd normalized_weights(const Eigen::VectorXd& raw);

}  // namespace bpt
