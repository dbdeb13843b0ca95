#include "bpt/kernels.hpp"

#include <cmath>

#include "bpt/errors.hpp"

namespace bpt {
namespace {

// Scaled squared distance sum_j (a_j - b_j)^2 / l_j^2.
double scaled_sq_dist(const KernelSpec& spec, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
  double q = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double d = (a[j] - b[j]) / spec.lengthscale(j);
    q += d * d;
  }
  return q;
}

double eval_from_sq_dist(const KernelSpec& spec, double q) {
  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return spec.signal_variance * std::exp(-0.5 * q);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(q);
      const double s = std::sqrt(5.0) * r;
      return spec.signal_variance * (1.0 + s + 5.0 / 3.0 * q) * std::exp(-s);
    }
  }
  throw ConfigError("unknown kernel family");
}

}  // namespace

void KernelSpec::validate(Eigen::Index dim) const {
  if (signal_variance <= 0.0) {
    throw ConfigError("kernel signal_variance must be positive");
  }
  if (lengthscales.size() != 1 && lengthscales.size() != dim) {
    throw ConfigError("kernel lengthscales must be shared or one per input dimension");
  }
  if ((lengthscales.array() <= 0.0).any()) {
    throw ConfigError("kernel lengthscales must be positive");
  }
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ConfigError("kernel_eval: point dimensions differ");
  }
  spec.validate(a.size());
  return eval_from_sq_dist(spec, scaled_sq_dist(spec, a, b));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec,
                              const Eigen::MatrixXd& a_points,
                              const Eigen::MatrixXd& b_points) {
  if (a_points.cols() != b_points.cols()) {
    throw ConfigError("kernel_matrix: point dimensions differ");
  }
  spec.validate(a_points.cols());

  // Scale columns once, then use the (|a|^2 + |b|^2 - 2 a.b) expansion.
  Eigen::MatrixXd sa = a_points;
  Eigen::MatrixXd sb = b_points;
  for (Eigen::Index j = 0; j < a_points.cols(); ++j) {
    const double inv = 1.0 / spec.lengthscale(j);
    sa.col(j) *= inv;
    sb.col(j) *= inv;
  }
  const Eigen::VectorXd na = sa.rowwise().squaredNorm();
  const Eigen::VectorXd nb = sb.rowwise().squaredNorm();
  Eigen::MatrixXd q = -2.0 * (sa * sb.transpose());
  q.colwise() += na;
  q.rowwise() += nb.transpose();
  Eigen::MatrixXd out(a_points.rows(), b_points.rows());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = eval_from_sq_dist(spec, std::max(0.0, q(i, j)));
    }
  }
  return out;
}

Eigen::MatrixXd kernel_matrix_sym(const KernelSpec& spec,
                                  const Eigen::MatrixXd& points) {
  Eigen::MatrixXd k = kernel_matrix(spec, points, points);
  // Exact stationarity and symmetry on the diagonal blocks.
  for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, i) = spec.signal_variance;
  k = 0.5 * (k + k.transpose()).eval();
  return k;
}

}  // namespace bpt
