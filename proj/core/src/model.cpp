#include "ousg/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <limits>

#include "ousg/quadrature.hpp"

namespace ousg {

SpectralParams::SpectralParams(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.empty()) throw Error(ErrorCode::DimensionMismatch, "empty rate vector");
  lambda_min_ = lambdas_[0];
  lambda_max_ = lambdas_[0];
  lambda_sum_ = 0.0;
  for (double l : lambdas_) {
    if (!(l > 0.0)) throw Error(ErrorCode::NotHurwitz, "rate must be strictly positive");
    lambda_min_ = std::min(lambda_min_, l);
    lambda_max_ = std::max(lambda_max_, l);
    lambda_sum_ += l;
  }
}

GaussianMeasure::GaussianMeasure(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols())
    throw Error(ErrorCode::DimensionMismatch, "covariance not square");
  if (!sigma_.isApprox(sigma_.transpose(), 1e-12))
    throw Error(ErrorCode::NotSymmetric, "covariance not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "covariance not positive definite");
  chol_ = llt.matrixL();
  sigma_inv_ = llt.solve(Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols()));
  double log_det = 0.0;
  for (int i = 0; i < chol_.rows(); ++i) log_det += 2.0 * std::log(chol_(i, i));
  double n = static_cast<double>(sigma_.rows());
  log_norm_ = -0.5 * n * std::log(2.0 * M_PI) - 0.5 * log_det;
}

double GaussianMeasure::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != sigma_.rows()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  return log_norm_ - 0.5 * x.dot(sigma_inv_ * x);
}

double GaussianMeasure::density(const Eigen::VectorXd& x) const { return std::exp(log_density(x)); }

Eigen::VectorXd GaussianMeasure::sample(CounterRng& rng) const {
  Eigen::VectorXd z(dim());
  for (int i = 0; i < dim(); ++i) z(i) = rng.normal();
  return chol_ * z;
}

OUModel::OUModel(Eigen::MatrixXd Q, Eigen::MatrixXd B, Eigen::VectorXcd eigs)
    : Q_(std::move(Q)), B_(std::move(B)), drift_eigs_(std::move(eigs)) {}

OUModel OUModel::validate(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& B) {
  if (Q.rows() != Q.cols() || B.rows() != B.cols() || Q.rows() != B.rows())
    throw Error(ErrorCode::DimensionMismatch, "Q and B must be square of equal size");
  double scale = std::max(1.0, Q.norm());
  if ((Q - Q.transpose()).norm() > 1e-10 * scale)
    throw Error(ErrorCode::NotSymmetric, "Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qes(Q);
  if (qes.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::NotPositiveDefinite, "Q has a nonpositive eigenvalue");
  Eigen::EigenSolver<Eigen::MatrixXd> bes(B);
  Eigen::VectorXcd eigs = bes.eigenvalues();
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs(i).real() >= 0.0)
      throw Error(ErrorCode::NotHurwitz, "B has an eigenvalue with nonnegative real part");
  }
  return OUModel(Q, B, eigs);
}

OUModel OUModel::diagonal(const SpectralParams& params) {
  int n = params.dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) B(j, j) = -params.lambda(j);
  return validate(Eigen::MatrixXd::Identity(n, n), B);
}

bool OUModel::is_diagonal(double tol) const {
  if (!Q_.isApprox(Eigen::MatrixXd::Identity(dim(), dim()), tol)) return false;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (i != j && std::abs(B_(i, j)) > tol) return false;
  return true;
}

std::optional<SpectralParams> OUModel::diagonal_params(double tol) const {
  if (!is_diagonal(tol)) return std::nullopt;
  std::vector<double> lams(static_cast<std::size_t>(dim()));
  for (int j = 0; j < dim(); ++j) lams[static_cast<std::size_t>(j)] = -B_(j, j);
  return SpectralParams(lams);
}

namespace {

using MatrixIntegrand = std::function<Eigen::MatrixXd(double)>;

Eigen::MatrixXd gl_matrix(const MatrixIntegrand& g, double a, double b, int order) {
  const QuadRule& rule = gauss_legendre(order);
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  Eigen::MatrixXd acc = rule.weights[0] * g(mid + half * rule.nodes[0]);
  for (int i = 1; i < rule.size(); ++i) {
    acc += rule.weights[i] * g(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

// Adaptive Gauss-Legendre with entrywise tolerance; one refinement pattern
// shared by all entries so each e^{sB} is evaluated once per node.
Eigen::MatrixXd matrix_adaptive_rec(const MatrixIntegrand& g, double a, double b, double tol,
                                    int depth) {
  Eigen::MatrixXd coarse = gl_matrix(g, a, b, 10);
  Eigen::MatrixXd fine = gl_matrix(g, a, b, 20);
  double err = (fine - coarse).cwiseAbs().maxCoeff();
  if (err <= tol) return fine;
  if (depth >= 40) throw Error(ErrorCode::QuadratureFailure, "matrix quadrature did not converge");
  double mid = 0.5 * (a + b);
  return matrix_adaptive_rec(g, a, mid, 0.5 * tol, depth + 1) +
         matrix_adaptive_rec(g, mid, b, 0.5 * tol, depth + 1);
}

Eigen::MatrixXd integrate_matrix_adaptive(const MatrixIntegrand& g, double a, double b,
                                          double tol) {
  return matrix_adaptive_rec(g, a, b, tol, 0);
}

}  // namespace

Eigen::MatrixXd lyapunov_qinf(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q) {
  int n = static_cast<int>(B.rows());
  Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  // vec(B X + X B^T) = (I (x) B + B (x) I) vec(X)
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = identity(i, k) * B(j, l) + B(i, k) * identity(j, l);
          kron(i * n + j, k * n + l) = v;
        }
  Eigen::VectorXd rhs(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs(i * n + j) = -Q(j, i);
  Eigen::VectorXd x = kron.fullPivLu().solve(rhs);
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) X(j, i) = x(i * n + j);
  return 0.5 * (X + X.transpose());
}

GaussianMeasure covariance_qt(const OUModel& model, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  int n = model.dim();
  if (std::isinf(t)) {
    return GaussianMeasure(lyapunov_qinf(model.B(), model.Q()));
  }
  if (model.is_diagonal()) {
    // entrywise closed form; Q = I so off-diagonal entries vanish
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      double lam = -model.B()(j, j);
      sigma(j, j) = -std::expm1(-2.0 * lam * t) / (2.0 * lam);
    }
    return GaussianMeasure(sigma);
  }
  // closed form for diagonal B with general symmetric Q
  bool b_diag = true;
  for (int i = 0; i < n && b_diag; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(model.B()(i, j)) > 1e-14) {
        b_diag = false;
        break;
      }
  if (b_diag) {
    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double rate = -(model.B()(i, i) + model.B()(j, j));
        sigma(i, j) = -model.Q()(i, j) * std::expm1(-rate * t) / rate;
      }
    return GaussianMeasure(sigma);
  }
  auto integrand = [&](double s) -> Eigen::MatrixXd {
    Eigen::MatrixXd e = (s * model.B()).exp();
    return e * model.Q() * e.transpose();
  };
  Eigen::MatrixXd sigma = integrate_matrix_adaptive(integrand, 0.0, t, 1e-12);
  return GaussianMeasure(0.5 * (sigma + sigma.transpose()));
}

double generator_apply(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x) {
  int n = model.dim();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = 1.0 + x.norm();
  const double hg = std::cbrt(eps) * scale;           // gradient step
  const double hh = std::pow(eps, 0.25) * scale;       // Hessian step
  Eigen::VectorXd grad(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += hg;
    xm(j) -= hg;
    grad(j) = (f(xp) - f(xm)) / (2.0 * hg);
  }
  double f0 = f(x);
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += hh;
    xm(i) -= hh;
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (hh * hh);
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp(i) += hh;
      xpp(j) += hh;
      xpm(i) += hh;
      xpm(j) -= hh;
      xmp(i) -= hh;
      xmp(j) += hh;
      xmm(i) -= hh;
      xmm(j) -= hh;
      double v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hh * hh);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return 0.5 * (model.Q() * hess).trace() + (model.B() * x).dot(grad);
}

}  // namespace ousg
