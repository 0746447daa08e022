#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ousg/errors.hpp"
#include "ousg/model.hpp"
#include "ousg/normal_form.hpp"

namespace ousg {

/// Kernel variant selector: rates plus the damping factor multiplying the
/// quadratic exponent. kappa = 1 is the plain kernel; kappa = 1/2 is the
/// bound kernel dominating every 2x2 block.
struct KernelSpec {
  SpectralParams params;
  double kappa = 1.0;
};

/// log of the one-dimensional kernel
///   exp(lambda x^2) (1-e^{-2 lambda t})^{-1/2}
///     exp(-lambda (x - e^{-lambda t} u)^2 / (1-e^{-2 lambda t})).
/// The quadratic exponent is scaled by kappa.
inline double log_kernel_1d_kappa(double lambda, double kappa, double t, double x, double u) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidTime, "t must be positive");
  double d = -std::expm1(-2.0 * lambda * t);  // 1 - e^{-2 lambda t}, stable for small t
  double z = x - std::exp(-lambda * t) * u;
  return lambda * x * x - 0.5 * std::log(d) - kappa * lambda * z * z / d;
}

inline double log_kernel_1d(double lambda, double t, double x, double u) {
  return log_kernel_1d_kappa(lambda, 1.0, t, x, u);
}

inline double kernel_1d(double lambda, double t, double x, double u) {
  return std::exp(log_kernel_1d(lambda, t, x, u));
}

/// log of the tensor-product kernel over all coordinates.
double log_kernel_diag(const SpectralParams& params, double t, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u);
double kernel_diag(const SpectralParams& params, double t, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& u);

/// log of the kappa-damped kernel of spec.kappa.
double log_kernel_kappa(const KernelSpec& spec, double t, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u);
double kernel_kappa(const KernelSpec& spec, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u);

/// log of the two-dimensional block kernel with rotation rate q:
///   exp(lambda |x|^2) (1-e^{-2 lambda t})^{-1}
///     exp(-lambda |x - e^{-lambda t} u|^2 / (1-e^{-2 lambda t}))
///     exp(-lambda e^{-lambda t}/(1-e^{-2 lambda t})
///           [(1-cos(qt)) <x,u> + sin(qt) (x1 u2 - x2 u1)]).
double log_kernel_block2d(double lambda, double q, double t, const Eigen::Vector2d& x,
                          const Eigen::Vector2d& u);
double kernel_block2d(double lambda, double q, double t, const Eigen::Vector2d& x,
                      const Eigen::Vector2d& u);

/// log of the q-independent majorant of the block kernel (the kappa = 1/2
/// form with the same lambda on both coordinates).
double log_bound_block2d(double lambda, double t, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& u);
double bound_block2d(double lambda, double t, const Eigen::Vector2d& x, const Eigen::Vector2d& u);

/// log bound_block2d - log kernel_block2d evaluated without the cancelling
/// exp(lambda |x|^2) and normalization terms, so the sign is exact even
/// where the two kernels are astronomically large.
double block2d_bound_log_margin(double lambda, double q, double t, const Eigen::Vector2d& x,
                                const Eigen::Vector2d& u);

/// log kernel of the canonical model: block kernels over the 2x2 blocks
/// followed by one-dimensional kernels over the scalar tail. Points are in
/// canonical coordinates.
double log_kernel_general(const CanonicalForm& form, double t, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u);
double kernel_general(const CanonicalForm& form, double t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& u);

}  // namespace ousg
