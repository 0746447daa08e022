#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "ousg/mehler.hpp"
#include "ousg/model.hpp"

namespace ousg {

/// Strictly increasing evaluation times, with the split between the small-t
/// regime (t <= 1) and the large-t regime (t > 1) precomputed.
class TGrid {
 public:
  explicit TGrid(std::vector<double> points);

  /// 200 log-spaced points on [1e-4, 1e2] plus the exact point t = 1.
  static TGrid standard();
  static TGrid log_spaced(double lo, double hi, int count, bool include_one = true);

  const std::vector<double>& points() const { return points_; }
  /// index of the first point with t > 1
  std::size_t split_at_one() const { return split_; }

 private:
  std::vector<double> points_;
  std::size_t split_;
};

/// Axis-aligned box used to declare the support of a test integrand; nodes
/// outside it are skipped during quadrature.
struct SupportBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool contains(const Eigen::VectorXd& x) const {
    for (int j = 0; j < x.size(); ++j)
      if (x(j) < lo(j) || x(j) > hi(j)) return false;
    return true;
  }
};

/// Semigroup application through the shifted-measure route:
///   integral of f(e^{tB} x - y) against the transition Gaussian.
/// Tensor Gauss-Hermite in the eigenbasis of the covariance.
double apply_kolmogorov(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x,
                        double t, int order = 64,
                        const std::optional<SupportBox>& support = std::nullopt);

/// Semigroup application through the kernel route:
///   integral of K_t(x, u) f(u) against the invariant measure.
/// Requires a diagonal model; must agree with apply_kolmogorov within
/// combined quadrature tolerance.
double apply_mehler(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x, double t,
                    int order = 64, const std::optional<SupportBox>& support = std::nullopt);

/// Kernel route in canonical coordinates (x, u canonical).
double apply_mehler_canonical(const CanonicalForm& form, const ScalarField& f,
                              const Eigen::VectorXd& x, double t, int order = 64);

struct MaximalResult {
  double value;        // sup over the grid of |H_t f(x)|
  double argmax_t;
  double small_t_max;  // sup over t <= 1 (0 when the regime is empty)
  double large_t_max;  // sup over t > 1
};

/// Maximal operator of an arbitrary per-time evaluator over a grid.
MaximalResult maximal_over_grid(const TGrid& grid, const std::function<double(double)>& ht);

/// Maximal operator of the semigroup at x (kernel route).
MaximalResult maximal(const OUModel& model, const ScalarField& f, const Eigen::VectorXd& x,
                      const TGrid& grid, int order = 64);

/// Exact draws from the transition law N(e^{tB} x, Q_t); row i of the result
/// is sample i. Streams are indexed per sample, so the batch is identical
/// for a fixed seed regardless of evaluation order.
Eigen::MatrixXd sde_sample(const OUModel& model, const Eigen::VectorXd& x, double t, int count,
                           std::uint64_t seed);

/// Exact Markov transitions through the listed times; row i is the state at
/// times[i]. The marginal law at each time matches sde_sample.
Eigen::MatrixXd sde_path(const OUModel& model, const Eigen::VectorXd& x,
                         const std::vector<double>& times, std::uint64_t seed);

}  // namespace ousg
