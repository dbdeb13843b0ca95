#include "bpt/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <utility>

#include "bpt/errors.hpp"

namespace bpt {
namespace {

// Lower Cholesky with explicit failure signalling.
bool try_llt(const Eigen::MatrixXd& m, Eigen::MatrixXd* lower) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  *lower = llt.matrixL();
  return true;
}

}  // namespace

double RffSampler::operator()(const Eigen::VectorXd& p) const {
  return prior_mean_ +
         scale_ * weights_.dot(((frequencies_ * p) + phases_).array().cos().matrix());
}

Eigen::VectorXd RffSampler::eval(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd phi =
      (points * frequencies_.transpose()).rowwise() + phases_.transpose();
  return Eigen::VectorXd::Constant(points.rows(), prior_mean_) +
         scale_ * (phi.array().cos().matrix() * weights_);
}

GpModel::GpModel(KernelSpec kernel, double noise_variance)
    : kernel_(std::move(kernel)), noise_variance_(noise_variance) {
  if (noise_variance_ <= 0.0) {
    throw ConfigError("noise_variance must be positive");
  }
  if (kernel_.signal_variance <= 0.0) {
    throw ConfigError("kernel signal_variance must be positive");
  }
  jitter_ = base_jitter();
  points_.resize(0, 0);
  values_.resize(0);
  chol_.resize(0, 0);
  beta_.resize(0);
}

GpModel::GpModel(KernelSpec kernel, double noise_variance,
                 const Eigen::MatrixXd& points, const Eigen::VectorXd& values)
    : GpModel(std::move(kernel), noise_variance) {
  if (points.rows() != values.size()) {
    throw ConfigError("history points and values disagree in length");
  }
  kernel_.validate(points.cols());
  points_ = points;
  values_ = values;
  rebuild(base_jitter());
}

void GpModel::rebuild(double jitter) {
  const Eigen::Index t = values_.size();
  double j = jitter;
  while (true) {
    Eigen::MatrixXd k = kernel_matrix_sym(kernel_, points_);
    k.diagonal().array() += noise_variance_ + j;
    if (try_llt(k, &chol_)) break;
    j *= 10.0;
    if (j > max_jitter()) {
      throw NumericError("GP factorization failed after jitter escalation");
    }
  }
  jitter_ = j;
  beta_ = chol_.triangularView<Eigen::Lower>().solve(
      values_ - Eigen::VectorXd::Constant(t, kernel_.prior_mean));
  refresh_grid_cache();
}

void GpModel::extend_factor(const Eigen::VectorXd& p, double y) {
  const Eigen::Index t = values_.size();
  const double c =
      kernel_.signal_variance + noise_variance_ + jitter_;  // k(p,p) + noise
  Eigen::VectorXd cross(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    cross[i] = kernel_eval(kernel_, points_.row(i).transpose(), p);
  }
  const Eigen::VectorXd l =
      chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(cross);
  const double d_sq = c - l.squaredNorm();
  if (!(d_sq > 0.0) || !std::isfinite(d_sq)) {
    // Fall back to a batch rebuild with escalated jitter.
    points_.conservativeResize(t + 1, p.size());
    points_.row(t) = p;
    values_.conservativeResize(t + 1);
    values_[t] = y;
    rebuild(jitter_ * 10.0);
    return;
  }
  const double d = std::sqrt(d_sq);

  points_.conservativeResize(t + 1, p.size());
  points_.row(t) = p;
  values_.conservativeResize(t + 1);
  values_[t] = y;

  chol_.conservativeResize(t + 1, t + 1);
  chol_.row(t).head(t) = l.transpose();
  chol_.col(t).head(t).setZero();
  chol_(t, t) = d;

  beta_.conservativeResize(t + 1);
  beta_[t] = (y - kernel_.prior_mean - l.dot(beta_.head(t))) / d;

  if (has_grid()) {
    Eigen::RowVectorXd k_new =
        kernel_matrix(kernel_, p.transpose(), grid_points_);
    Eigen::RowVectorXd proj_new =
        (k_new - l.transpose() * grid_proj_.topRows(t)) / d;
    grid_proj_.conservativeResize(t + 1, Eigen::NoChange);
    grid_proj_.row(t) = proj_new;
    grid_mean_ += beta_[t] * proj_new.transpose();
    grid_var_ =
        (grid_var_ - proj_new.array().square().matrix().transpose())
            .cwiseMax(0.0);
  }
}

void GpModel::add_observation(const Eigen::VectorXd& p, double y) {
  if (points_.rows() == 0) {
    kernel_.validate(p.size());
    points_.resize(0, p.size());
  } else if (p.size() != points_.cols()) {
    throw ConfigError("observation dimension differs from history");
  }
  extend_factor(p, y);
}

GpModel GpModel::conditioned(const Eigen::VectorXd& p, double y) const {
  GpModel next = *this;
  next.add_observation(p, y);
  return next;
}

PosteriorMoments GpModel::predict(const Eigen::VectorXd& p) const {
  Eigen::VectorXd mean, var;
  predict_many(p.transpose(), &mean, &var);
  return {mean[0], var[0]};
}

void GpModel::predict_many(const Eigen::MatrixXd& points,
                           Eigen::VectorXd* mean,
                           Eigen::VectorXd* variance) const {
  const Eigen::Index t = values_.size();
  const Eigen::Index n = points.rows();
  if (t == 0) {
    kernel_.validate(points.cols());
    *mean = Eigen::VectorXd::Constant(n, kernel_.prior_mean);
    *variance = Eigen::VectorXd::Constant(n, kernel_.signal_variance);
    return;
  }
  const Eigen::MatrixXd cross = kernel_matrix(kernel_, points_, points);
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(cross);
  *mean = Eigen::VectorXd::Constant(n, kernel_.prior_mean) + v.transpose() * beta_;
  *variance = (Eigen::VectorXd::Constant(n, kernel_.signal_variance) -
               v.colwise().squaredNorm().transpose())
                  .cwiseMax(0.0);
}

double GpModel::posterior_cov(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b) const {
  const double prior = kernel_eval(kernel_, a, b);
  const Eigen::Index t = values_.size();
  if (t == 0) return prior;
  const Eigen::MatrixXd cross_a = kernel_matrix(kernel_, points_, a.transpose());
  const Eigen::MatrixXd cross_b = kernel_matrix(kernel_, points_, b.transpose());
  const Eigen::VectorXd va = chol_.triangularView<Eigen::Lower>().solve(cross_a);
  const Eigen::VectorXd vb = chol_.triangularView<Eigen::Lower>().solve(cross_b);
  return prior - va.dot(vb);
}

Eigen::MatrixXd GpModel::posterior_cov_matrix(
    const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd cov = kernel_matrix_sym(kernel_, points);
  const Eigen::Index t = values_.size();
  if (t > 0) {
    const Eigen::MatrixXd cross = kernel_matrix(kernel_, points_, points);
    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
    cov -= v.transpose() * v;
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
  return cov;
}

Eigen::VectorXd GpModel::sample_on_grid(const Eigen::MatrixXd& points,
                                        Rng& rng) const {
  if (points.rows() == 0) {
    throw ConfigError("sample_on_grid needs a nonempty grid");
  }
  Eigen::VectorXd mean, var;
  predict_many(points, &mean, &var);
  Eigen::MatrixXd cov = posterior_cov_matrix(points);
  Eigen::MatrixXd lower;
  double j = base_jitter();
  while (true) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += j;
    if (try_llt(shifted, &lower)) break;
    j *= 10.0;
    if (j > max_jitter()) {
      throw NumericError("joint covariance is not PSD after jitter escalation");
    }
  }
  Eigen::VectorXd z(points.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + lower * z;
}

RffSampler GpModel::sample_rff(int num_features, std::uint64_t seed) const {
  if (num_features < 1) {
    throw ConfigError("sample_rff needs at least one feature");
  }
  const Eigen::Index dim =
      points_.rows() > 0 ? points_.cols() : kernel_.lengthscales.size();
  if (dim < 1) {
    throw ConfigError("sample_rff cannot infer input dimension");
  }
  kernel_.validate(dim);

  Rng rng(seed);
  RffSampler s;
  s.prior_mean_ = kernel_.prior_mean;
  s.scale_ = std::sqrt(2.0 * kernel_.signal_variance / num_features);
  s.frequencies_.resize(num_features, dim);
  s.phases_.resize(num_features);
  for (int i = 0; i < num_features; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      s.frequencies_(i, j) = rng.normal() / kernel_.lengthscale(j);
    }
    if (kernel_.family == KernelFamily::Matern52) {
      // Matern-5/2 spectral density: scale the Gaussian frequency by
      // sqrt(5 / chi^2_5), realized as five squared normals.
      double u = 0.0;
      for (int q = 0; q < 5; ++q) {
        const double g = rng.normal();
        u += g * g;
      }
      s.frequencies_.row(i) *= std::sqrt(5.0 / u);
    }
    s.phases_[i] = 2.0 * M_PI * rng.uniform();
  }
  Eigen::VectorXd prior_draw(num_features);
  for (int i = 0; i < num_features; ++i) prior_draw[i] = rng.normal();

  const Eigen::Index t = values_.size();
  if (t == 0) {
    s.weights_ = prior_draw;
    return s;
  }

  // Bayesian linear regression on the feature map: theta ~ N(0, I),
  // y = Phi theta + prior_mean + eps.
  Eigen::MatrixXd phi =
      ((points_ * s.frequencies_.transpose()).rowwise() + s.phases_.transpose())
          .array()
          .cos()
          .matrix() *
      s.scale_;
  Eigen::MatrixXd precision =
      Eigen::MatrixXd::Identity(num_features, num_features) +
      phi.transpose() * phi / noise_variance_;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericError("RFF weight posterior factorization failed");
  }
  const Eigen::VectorXd rhs =
      phi.transpose() *
      (values_ - Eigen::VectorXd::Constant(t, kernel_.prior_mean)) /
      noise_variance_;
  const Eigen::VectorXd mean_w = llt.solve(rhs);
  // theta = mean + L^{-T} z gives Cov = (L L^T)^{-1} = precision^{-1}.
  const Eigen::VectorXd fluct =
      llt.matrixU().solve(prior_draw);
  s.weights_ = mean_w + fluct;
  return s;
}

double GpModel::log_marginal_likelihood() const {
  const Eigen::Index t = values_.size();
  if (t == 0) {
    throw UsageError("log_marginal_likelihood needs a nonempty history");
  }
  return -0.5 * beta_.squaredNorm() -
         chol_.diagonal().array().log().sum() -
         0.5 * t * std::log(2.0 * M_PI);
}

void GpModel::attach_grid(const Eigen::MatrixXd& points) {
  kernel_.validate(points.cols());
  grid_points_ = points;
  refresh_grid_cache();
}

void GpModel::refresh_grid_cache() {
  if (!has_grid()) return;
  const Eigen::Index t = values_.size();
  const Eigen::Index g = grid_points_.rows();
  if (t == 0) {
    grid_proj_.resize(0, g);
    grid_mean_ = Eigen::VectorXd::Constant(g, kernel_.prior_mean);
    grid_var_ = Eigen::VectorXd::Constant(g, kernel_.signal_variance);
    return;
  }
  const Eigen::MatrixXd cross = kernel_matrix(kernel_, points_, grid_points_);
  grid_proj_ = chol_.triangularView<Eigen::Lower>().solve(cross);
  grid_mean_ = Eigen::VectorXd::Constant(g, kernel_.prior_mean) +
               grid_proj_.transpose() * beta_;
  grid_var_ = (Eigen::VectorXd::Constant(g, kernel_.signal_variance) -
               grid_proj_.colwise().squaredNorm().transpose())
                  .cwiseMax(0.0);
}

double GpModel::grid_cov(Eigen::Index i, Eigen::Index j) const {
  if (!has_grid()) throw UsageError("grid_cov requires an attached grid");
  const double prior = kernel_eval(kernel_, grid_points_.row(i).transpose(),
                                   grid_points_.row(j).transpose());
  if (values_.size() == 0) return prior;
  return prior - grid_proj_.col(i).dot(grid_proj_.col(j));
}

void HyperBounds::validate() const {
  if (lengthscale_min > lengthscale_max ||
      signal_variance_min > signal_variance_max ||
      noise_variance_min > noise_variance_max) {
    throw ConfigError("hyperparameter bounds are empty (min > max)");
  }
  if (lengthscale_min <= 0.0 || signal_variance_min <= 0.0 ||
      noise_variance_min <= 0.0) {
    throw ConfigError("hyperparameter bounds must be positive");
  }
}

namespace {

struct HyperObjective {
  const GpModel& model;
  Eigen::Index num_ls;

  double operator()(const Eigen::VectorXd& log_params) const {
    KernelSpec spec = model.kernel();
    spec.lengthscales = log_params.head(num_ls).array().exp();
    spec.signal_variance = std::exp(log_params[num_ls]);
    const double noise = std::exp(log_params[num_ls + 1]);
    try {
      GpModel candidate(spec, noise, model.history_points(),
                        model.history_values());
      return candidate.log_marginal_likelihood();
    } catch (const NumericError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }
};

}  // namespace

HyperFit fit_hyperparameters(const GpModel& model, const HyperBounds& bounds,
                             int num_starts, std::uint64_t seed) {
  bounds.validate();
  if (num_starts < 1) throw ConfigError("fit_hyperparameters needs num_starts >= 1");
  if (model.num_observations() == 0) {
    throw UsageError("fit_hyperparameters needs a nonempty history");
  }

  const Eigen::Index num_ls = model.kernel().lengthscales.size();
  const Eigen::Index dim = num_ls + 2;
  Eigen::VectorXd lo(dim), hi(dim);
  lo.head(num_ls).setConstant(std::log(bounds.lengthscale_min));
  hi.head(num_ls).setConstant(std::log(bounds.lengthscale_max));
  lo[num_ls] = std::log(bounds.signal_variance_min);
  hi[num_ls] = std::log(bounds.signal_variance_max);
  lo[num_ls + 1] = std::log(bounds.noise_variance_min);
  hi[num_ls + 1] = std::log(bounds.noise_variance_max);

  const HyperObjective objective{model, num_ls};
  auto clip = [&](Eigen::VectorXd v) {
    return v.cwiseMax(lo).cwiseMin(hi).eval();
  };

  Eigen::VectorXd incumbent(dim);
  incumbent.head(num_ls) = model.kernel().lengthscales.array().log();
  incumbent[num_ls] = std::log(model.kernel().signal_variance);
  incumbent[num_ls + 1] = std::log(model.noise_variance());
  const double incumbent_value = model.log_marginal_likelihood();

  Rng rng(seed);
  Eigen::VectorXd best = incumbent;
  double best_value = incumbent_value;

  for (int start = 0; start < num_starts; ++start) {
    Eigen::VectorXd x = clip(incumbent);
    if (start > 0) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        x[j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
      }
    }
    double fx = objective(x);
    double step = 0.5;
    while (step >= 1e-3) {
      bool improved = false;
      for (Eigen::Index j = 0; j < dim; ++j) {
        for (const double direction : {+1.0, -1.0}) {
          Eigen::VectorXd trial = x;
          trial[j] += direction * step;
          trial = clip(trial);
          const double ft = objective(trial);
          if (ft > fx) {
            x = trial;
            fx = ft;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx > best_value) {
      best_value = fx;
      best = x;
    }
  }

  HyperFit fit;
  if (best_value <= incumbent_value) {
    fit.kernel = model.kernel();
    fit.noise_variance = model.noise_variance();
    fit.log_marginal = incumbent_value;
    return fit;
  }
  fit.kernel = model.kernel();
  fit.kernel.lengthscales = best.head(num_ls).array().exp();
  fit.kernel.signal_variance = std::exp(best[num_ls]);
  fit.noise_variance = std::exp(best[num_ls + 1]);
  fit.log_marginal = best_value;
  return fit;
}

}  // namespace bpt
