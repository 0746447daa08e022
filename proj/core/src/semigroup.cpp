#include "ousg/semigroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>

#include "ousg/quadrature.hpp"

namespace ousg {

TGrid::TGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidTime, "empty time grid");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > 0.0)) throw Error(ErrorCode::InvalidTime, "grid times must be positive");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw Error(ErrorCode::InvalidTime, "grid times must be strictly increasing");
  }
  split_ = points_.size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] > 1.0) {
      split_ = i;
      break;
    }
  }
}

TGrid TGrid::log_spaced(double lo, double hi, int count, bool include_one) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count) + 1);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    pts.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) / (count - 1)));
  }
  if (include_one && lo < 1.0 && hi > 1.0) pts.push_back(1.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return TGrid(pts);
}

TGrid TGrid::standard() { return log_spaced(1e-4, 1e2, 200); }

double apply_kolmogorov(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x,
                        double t, int order, const std::optional<SupportBox>& support) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  int n = model.dim();
  GaussianMeasure gt = covariance_qt(model, t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gt.covariance());
  Eigen::MatrixXd scale = es.eigenvectors() * (2.0 * es.eigenvalues()).cwiseSqrt().asDiagonal();
  Eigen::VectorXd mean = (t * model.B()).exp() * x;
  double norm = std::pow(M_PI, -0.5 * n);
  auto g = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd y = mean - scale * z;
    if (support && !support->contains(y)) return 0.0;
    return f(y);
  };
  return norm * integrate_gh_tensor(n, order, g);
}

double apply_mehler(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x, double t,
                    int order, const std::optional<SupportBox>& support) {
  auto params = model.diagonal_params();
  if (!params) throw Error(ErrorCode::NotNormal, "kernel route requires a diagonal model");
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  int n = model.dim();
  double norm = std::pow(M_PI, -0.5 * n);
  Eigen::VectorXd u(n);
  auto g = [&](const Eigen::VectorXd& y) {
    for (int j = 0; j < n; ++j) u(j) = y(j) / std::sqrt(params->lambda(j));
    if (support && !support->contains(u)) return 0.0;
    double fu = f(u);
    if (fu == 0.0) return 0.0;
    return std::exp(log_kernel_diag(*params, t, x, u)) * fu;
  };
  return norm * integrate_gh_tensor(n, order, g);
}

double apply_mehler_canonical(const CanonicalForm& form, const ScalarField& f,
                              const Eigen::VectorXd& x, double t, int order) {
  SpectralParams rates = form.expanded_rates();
  int n = rates.dim();
  double norm = std::pow(M_PI, -0.5 * n);
  Eigen::VectorXd u(n);
  auto g = [&](const Eigen::VectorXd& y) {
    for (int j = 0; j < n; ++j) u(j) = y(j) / std::sqrt(rates.lambda(j));
    double fu = f(u);
    if (fu == 0.0) return 0.0;
    return std::exp(log_kernel_general(form, t, x, u)) * fu;
  };
  return norm * integrate_gh_tensor(n, order, g);
}

MaximalResult maximal_over_grid(const TGrid& grid, const std::function<double(double)>& ht) {
  MaximalResult res{0.0, grid.points().front(), 0.0, 0.0};
  bool first = true;
  for (std::size_t i = 0; i < grid.points().size(); ++i) {
    double t = grid.points()[i];
    double v = std::abs(ht(t));
    if (first || v > res.value) {
      res.value = v;
      res.argmax_t = t;
      first = false;
    }
    if (i < grid.split_at_one()) {
      res.small_t_max = std::max(res.small_t_max, v);
    } else {
      res.large_t_max = std::max(res.large_t_max, v);
    }
  }
  return res;
}

MaximalResult maximal(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x,
                      const TGrid& grid, int order) {
  return maximal_over_grid(grid, [&](double t) { return apply_mehler(model, f, x, t, order); });
}

namespace {

struct TransitionLaw {
  Eigen::MatrixXd propagator;  // e^{tB}
  Eigen::MatrixXd noise;       // Cholesky factor of Q_t
};

TransitionLaw transition_law(const OUModel& model, double t) {
  TransitionLaw law;
  law.propagator = (t * model.B()).exp();
  try {
    law.noise = covariance_qt(model, t).cholesky_factor();
  } catch (const Error& e) {
    throw Error(ErrorCode::CholeskyFailure, "transition covariance is numerically singular");
  }
  return law;
}

}  // namespace

Eigen::MatrixXd sde_sample(const OUModel& model, const Eigen::VectorXd& x, double t, int count,
                           std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::ConfigParse, "sample count must be >= 1");
  TransitionLaw law = transition_law(model, t);
  int n = model.dim();
  Eigen::VectorXd mean = law.propagator * x;
  Eigen::MatrixXd out(count, n);
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd z(n);
    for (int j = 0; j < n; ++j) z(j) = rng.normal();
    out.row(i) = (mean + law.noise * z).transpose();
  }
  return out;
}

Eigen::MatrixXd sde_path(const OUModel& model, const Eigen::VectorXd& x,
                         const std::vector<double>& times, std::uint64_t seed) {
  if (times.empty()) throw Error(ErrorCode::InvalidTime, "empty time list");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw Error(ErrorCode::InvalidTime, "times must be positive and increasing");
  }
  int n = model.dim();
  Eigen::MatrixXd out(static_cast<int>(times.size()), n);
  Eigen::VectorXd state = x;
  double prev = 0.0;
  // stream 0 so a single-time path reproduces sde_sample's first row
  CounterRng rng(seed, 0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    TransitionLaw law = transition_law(model, times[i] - prev);
    Eigen::VectorXd z(n);
    for (int j = 0; j < n; ++j) z(j) = rng.normal();
    state = law.propagator * state + law.noise * z;
    out.row(static_cast<int>(i)) = state.transpose();
    prev = times[i];
  }
  return out;
}

}  // namespace ousg
