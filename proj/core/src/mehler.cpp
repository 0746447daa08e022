#include "ousg/mehler.hpp"

namespace ousg {

namespace {

void check_dims(int n, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (x.size() != n || u.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "kernel point dimension");
}

// q t reduced to [-pi, pi] before the trigonometric factor; large |q t|
// loses all angular precision otherwise
inline double reduced_angle(double q, double t) {
  return std::remainder(q * t, 2.0 * M_PI);
}

}  // namespace

double log_kernel_diag(const SpectralParams& params, double t, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) {
  check_dims(params.dim(), x, u);
  double acc = 0.0;
  for (int j = 0; j < params.dim(); ++j) {
    acc += log_kernel_1d(params.lambda(j), t, x(j), u(j));
  }
  return acc;
}

double kernel_diag(const SpectralParams& params, double t, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& u) {
  return std::exp(log_kernel_diag(params, t, x, u));
}

double log_kernel_kappa(const KernelSpec& spec, double t, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u) {
  check_dims(spec.params.dim(), x, u);
  if (!(spec.kappa > 0.0)) throw Error(ErrorCode::ConfigParse, "kappa must be positive");
  double acc = 0.0;
  for (int j = 0; j < spec.params.dim(); ++j) {
    acc += log_kernel_1d_kappa(spec.params.lambda(j), spec.kappa, t, x(j), u(j));
  }
  return acc;
}

double kernel_kappa(const KernelSpec& spec, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u) {
  return std::exp(log_kernel_kappa(spec, t, x, u));
}

double log_kernel_block2d(double lambda, double q, double t, const Eigen::Vector2d& x,
                          const Eigen::Vector2d& u) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  double d = -std::expm1(-2.0 * lambda * t);
  double sigma = std::exp(-lambda * t);
  Eigen::Vector2d z = x - sigma * u;
  double angle = reduced_angle(q, t);
  double wedge = x(0) * u(1) - x(1) * u(0);
  double rot = (1.0 - std::cos(angle)) * x.dot(u) + std::sin(angle) * wedge;
  return lambda * x.squaredNorm() - std::log(d) - lambda * z.squaredNorm() / d -
         lambda * sigma / d * rot;
}

double kernel_block2d(double lambda, double q, double t, const Eigen::Vector2d& x,
                      const Eigen::Vector2d& u) {
  return std::exp(log_kernel_block2d(lambda, q, t, x, u));
}

double log_bound_block2d(double lambda, double t, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& u) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  double d = -std::expm1(-2.0 * lambda * t);
  double sigma = std::exp(-lambda * t);
  Eigen::Vector2d z = x - sigma * u;
  return lambda * x.squaredNorm() - std::log(d) - 0.5 * lambda * z.squaredNorm() / d;
}

double bound_block2d(double lambda, double t, const Eigen::Vector2d& x, const Eigen::Vector2d& u) {
  return std::exp(log_bound_block2d(lambda, t, x, u));
}

double block2d_bound_log_margin(double lambda, double q, double t, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& u) {
  double d = -std::expm1(-2.0 * lambda * t);
  double sigma = std::exp(-lambda * t);
  Eigen::Vector2d z = x - sigma * u;
  double angle = reduced_angle(q, t);
  double wedge = x(0) * u(1) - x(1) * u(0);
  double rot = (1.0 - std::cos(angle)) * x.dot(u) + std::sin(angle) * wedge;
  // shared prefactor and normalization cancel identically
  return 0.5 * lambda * z.squaredNorm() / d + lambda * sigma / d * rot;
}

double log_kernel_general(const CanonicalForm& form, double t, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u) {
  check_dims(form.dim(), x, u);
  double acc = 0.0;
  int pos = 0;
  for (const auto& [lambda, q] : form.blocks) {
    acc += log_kernel_block2d(lambda, q, t, x.segment<2>(pos), u.segment<2>(pos));
    pos += 2;
  }
  for (double lambda : form.scalars) {
    acc += log_kernel_1d(lambda, t, x(pos), u(pos));
    ++pos;
  }
  return acc;
}

double kernel_general(const CanonicalForm& form, double t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& u) {
  return std::exp(log_kernel_general(form, t, x, u));
}

}  // namespace ousg
