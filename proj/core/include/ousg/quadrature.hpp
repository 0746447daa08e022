#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace ousg {

/// Nodes and weights of an N-point rule. Gauss-Legendre rules integrate on
/// [-1,1] with weight 1; Gauss-Hermite rules integrate on R with weight
/// exp(-x^2) (physicists' convention, so the weights sum to sqrt(pi)).
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Golub-Welsch rules; results are cached per order.
const QuadRule& gauss_legendre(int order);
const QuadRule& gauss_hermite(int order);

/// Integral of f over [a, b] with a fixed-order Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order = 20);

/// Adaptive Gauss-Legendre on [a, b]: bisects intervals until the local
/// order/2 vs order estimate difference is below tol. Throws
/// QuadratureFailure when the subdivision limit is reached.
double integrate_gl_adaptive(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-12, int max_depth = 40);

/// Tensor Gauss-Hermite integral of g against exp(-|y|^2) dy on R^n, i.e.
///   sum over the product grid of (prod_j w_{i_j}) * g(y_{i_1},...,y_{i_n}).
/// Multiply by pi^{-n/2} to integrate against the standard Gaussian factor.
double integrate_gh_tensor(int n, int order, const std::function<double(const Eigen::VectorXd&)>& g);

}  // namespace ousg
