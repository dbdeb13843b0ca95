#include "bpt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bpt/errors.hpp"

namespace bpt {
namespace {

bool has_duplicate_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Index> order(m.rows());
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&m](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(a, j) != m(b, j)) return m(a, j) < m(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (m.row(order[i - 1]) == m.row(order[i])) return true;
  }
  return false;
}

}  // namespace

Eigen::VectorXd GridDomain::joint_point(Eigen::Index xi,
                                        Eigen::Index wi) const {
  Eigen::VectorXd p(design_dim() + env_dim());
  p.head(design_dim()) = design_points.row(xi);
  p.tail(env_dim()) = env_points.row(wi);
  return p;
}

Eigen::MatrixXd GridDomain::joint_grid() const {
  Eigen::MatrixXd grid(num_joint(), design_dim() + env_dim());
  for (Eigen::Index xi = 0; xi < num_design(); ++xi) {
    for (Eigen::Index wi = 0; wi < num_env(); ++wi) {
      grid.row(joint_index(xi, wi)).head(design_dim()) = design_points.row(xi);
      grid.row(joint_index(xi, wi)).tail(env_dim()) = env_points.row(wi);
    }
  }
  return grid;
}

Eigen::VectorXd GridDomain::env_mean() const {
  return env_points.transpose() * env_weights;
}

Eigen::Index GridDomain::nearest_env_index(const Eigen::VectorXd& w) const {
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index wi = 0; wi < num_env(); ++wi) {
    const double d = (env_points.row(wi).transpose() - w).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = wi;
    }
  }
  return best;
}

void GridDomain::validate() const {
  if (design_points.rows() == 0 || env_points.rows() == 0) {
    throw ConfigError("domain grids must be nonempty");
  }
  if (env_weights.size() != env_points.rows()) {
    throw ConfigError("env_weights size must match the environment grid");
  }
  if ((env_weights.array() < 0.0).any()) {
    throw ConfigError("env_weights must be nonnegative");
  }
  if (std::fabs(env_weights.sum() - 1.0) > 1e-9) {
    throw ConfigError("env_weights must sum to 1");
  }
  if (has_duplicate_rows(design_points) || has_duplicate_rows(env_points)) {
    throw ConfigError("domain grids must be duplicate-free");
  }
}

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n) {
  if (n < 1) throw ConfigError("linspace needs at least one point");
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

Eigen::MatrixXd product_grid(const std::vector<Eigen::VectorXd>& axes) {
  if (axes.empty()) throw ConfigError("product_grid needs at least one axis");
  Eigen::Index total = 1;
  for (const auto& axis : axes) {
    if (axis.size() == 0) throw ConfigError("product_grid axis is empty");
    total *= axis.size();
  }
  Eigen::MatrixXd grid(total, static_cast<Eigen::Index>(axes.size()));
  Eigen::Index repeat = total;
  for (std::size_t j = 0; j < axes.size(); ++j) {
    repeat /= axes[j].size();
    Eigen::Index row = 0;
    while (row < total) {
      for (Eigen::Index v = 0; v < axes[j].size(); ++v) {
        for (Eigen::Index r = 0; r < repeat; ++r) {
          grid(row++, static_cast<Eigen::Index>(j)) = axes[j][v];
        }
      }
    }
  }
  return grid;
}

Eigen::VectorXd normalized_weights(const Eigen::VectorXd& raw) {
  if ((raw.array() < 0.0).any()) {
    throw ConfigError("weights must be nonnegative");
  }
  const double total = raw.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ConfigError("weights have zero or non-finite total mass");
  }
  return raw / total;
}

}  // namespace bpt
