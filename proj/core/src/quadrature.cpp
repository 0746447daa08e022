#include "ousg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ousg/errors.hpp"

namespace ousg {

namespace {

// Symmetric tridiagonal Jacobi matrix -> nodes (eigenvalues) and weights
// (mu0 * first eigenvector components squared).
QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  int n = static_cast<int>(diag.size());
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = diag(i);
    if (i + 1 < n) {
      jacobi(i, i + 1) = offdiag(i);
      jacobi(i + 1, i) = offdiag(i);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadRule make_gauss_legendre(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(order - 1 > 0 ? order - 1 : 0);
  for (int i = 1; i < order; ++i) {
    double k = static_cast<double>(i);
    off(i - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  }
  return golub_welsch(diag, off, 2.0);
}

QuadRule make_gauss_hermite(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(order - 1 > 0 ? order - 1 : 0);
  for (int i = 1; i < order; ++i) {
    off(i - 1) = std::sqrt(static_cast<double>(i) / 2.0);
  }
  return golub_welsch(diag, off, std::sqrt(M_PI));
}

const QuadRule& cached_rule(int order, std::map<int, QuadRule>& cache, std::mutex& mtx,
                            QuadRule (*make)(int)) {
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make(order)).first;
  return it->second;
}

}  // namespace

const QuadRule& gauss_legendre(int order) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  return cached_rule(order, cache, mtx, &make_gauss_legendre);
}

const QuadRule& gauss_hermite(int order) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  return cached_rule(order, cache, mtx, &make_gauss_hermite);
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
  const QuadRule& rule = gauss_legendre(order);
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double tol,
                    int depth, int max_depth) {
  double coarse = integrate_gl(f, a, b, 10);
  double fine = integrate_gl(f, a, b, 20);
  if (std::abs(fine - coarse) <= tol || depth >= max_depth) {
    if (depth >= max_depth && std::abs(fine - coarse) > tol) {
      throw Error(ErrorCode::QuadratureFailure, "adaptive subdivision limit reached");
    }
    return fine;
  }
  double mid = 0.5 * (a + b);
  return adaptive_rec(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
         adaptive_rec(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_gl_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                             int max_depth) {
  return adaptive_rec(f, a, b, tol, 0, max_depth);
}

double integrate_gh_tensor(int n, int order, const std::function<double(const Eigen::VectorXd&)>& g) {
  const QuadRule& rule = gauss_hermite(order);
  Eigen::VectorXd y(n);
  std::vector<int> idx(n, 0);
  double acc = 0.0;
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      y(j) = rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
    }
    acc += w * g(y);
    int j = 0;
    while (j < n && ++idx[j] == rule.size()) {
      idx[j] = 0;
      ++j;
    }
    if (j == n) break;
  }
  return acc;
}

}  // namespace ousg
