#pragma once

#include <Eigen/Dense>

namespace bpt {

enum class KernelFamily { SquaredExponential, Matern52 };

// Stationary kernel over the joint (design, environment) space. Lengthscales
// hold either a single shared value or one value per input dimension.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales = Eigen::VectorXd::Ones(1);
  double prior_mean = 0.0;

  double lengthscale(Eigen::Index dim_index) const {
    return lengthscales.size() == 1 ? lengthscales[0]
                                    : lengthscales[dim_index];
  }

  // Throws ConfigError if the spec is unusable for `dim`-dimensional inputs.
  void validate(Eigen::Index dim) const;
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

// Cross-kernel matrix; points are matrix rows.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec,
                              const Eigen::MatrixXd& a_points,
                              const Eigen::MatrixXd& b_points);

Eigen::MatrixXd kernel_matrix_sym(const KernelSpec& spec,
                                  const Eigen::MatrixXd& points);

}  // namespace bpt
