#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "ousg/errors.hpp"
#include "ousg/rng.hpp"

namespace ousg {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Rates of the diagonal case: drift diag(-lambda_1,...,-lambda_n) with unit
/// covariance. All rates strictly positive.
class SpectralParams {
 public:
  explicit SpectralParams(std::vector<double> lambdas);

  int dim() const { return static_cast<int>(lambdas_.size()); }
  double lambda(int j) const { return lambdas_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double lambda_sum() const { return lambda_sum_; }

 private:
  std::vector<double> lambdas_;
  double lambda_min_;
  double lambda_max_;
  double lambda_sum_;
};

/// Zero-mean Gaussian with SPD covariance. Log-normalization and the
/// Cholesky factor are computed once; density and sampling are const.
class GaussianMeasure {
 public:
  explicit GaussianMeasure(Eigen::MatrixXd sigma);

  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Eigen::MatrixXd& covariance() const { return sigma_; }
  double log_norm() const { return log_norm_; }

  double log_density(const Eigen::VectorXd& x) const;
  double density(const Eigen::VectorXd& x) const;

  /// One exact draw; the factor L satisfies L L^T = sigma.
  Eigen::VectorXd sample(CounterRng& rng) const;
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  Eigen::MatrixXd sigma_inv_;
  double log_norm_;
};

/// The (Q, B) pair: Q symmetric positive definite, B Hurwitz. Immutable
/// after validation; drift eigenvalues are cached at construction.
class OUModel {
 public:
  /// Validates and constructs. Throws NotSymmetric, NotPositiveDefinite or
  /// NotHurwitz.
  static OUModel validate(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& B);

  /// Diagonal-case model: Q = I, B = diag(-lambda_j).
  static OUModel diagonal(const SpectralParams& params);

  int dim() const { return static_cast<int>(Q_.rows()); }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::VectorXcd& drift_eigenvalues() const { return drift_eigs_; }

  /// True when Q = I and B is diagonal (the Section-2-style special case).
  bool is_diagonal(double tol = 1e-12) const;
  /// Rates of the diagonal case, when is_diagonal() holds.
  std::optional<SpectralParams> diagonal_params(double tol = 1e-12) const;

 private:
  OUModel(Eigen::MatrixXd Q, Eigen::MatrixXd B, Eigen::VectorXcd eigs);

  Eigen::MatrixXd Q_;
  Eigen::MatrixXd B_;
  Eigen::VectorXcd drift_eigs_;
};

/// Solves B X + X B^T = -Q via the Kronecker-structured dense system.
/// Intended for dimensions up to ~16.
Eigen::MatrixXd lyapunov_qinf(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q);

/// Covariance of the transition law at time t: the integral of
/// e^{sB} Q e^{sB^T} over [0, t] for finite t, the Lyapunov solution for
/// t = +inf (pass std::numeric_limits<double>::infinity()). Uses the closed
/// form when B is diagonal, adaptive Gauss-Legendre otherwise.
GaussianMeasure covariance_qt(const OUModel& model, double t);

/// Generator applied by central finite differences:
///   (1/2) tr(Q Hess f(x)) + <B x, grad f(x)>.
double generator_apply(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x);

}  // namespace ousg
