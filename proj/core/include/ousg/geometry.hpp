#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ousg/model.hpp"

namespace ousg {

// ---------------------------------------------------------------------------
// interval sequence and localization rectangles

/// One axis of the localization grid: centers s^(nu) of the intervals
///   I_s = (s - 1/(1+|s|), s + 1/(1+|s|)]
/// that partition the real line, generated over a bounded window.
/// nu_lo is the index of the first stored center (centers[i] = s^(nu_lo+i)).
struct IntervalSequence {
  std::vector<double> centers;
  long nu_lo;

  double center(long nu) const { return centers.at(static_cast<std::size_t>(nu - nu_lo)); }
  long nu_hi() const { return nu_lo + static_cast<long>(centers.size()) - 1; }
  static double half_width(double s) { return 1.0 / (1.0 + std::abs(s)); }
  double left(long nu) const { return center(nu) - half_width(center(nu)); }
  double right(long nu) const { return center(nu) + half_width(center(nu)); }
};

/// All centers whose intervals intersect [lo, hi]. Consecutive centers obey
/// s - 1/(1+|s|) = previous right endpoint; s^(0) = 0 and s^(-nu) = -s^(nu).
IntervalSequence build_interval_sequence(double lo, double hi);

/// The center s^(nu) alone, walking the recursion from s^(0) = 0.
double interval_center(long nu);

/// Rectangles C_nu of the localization: product of the per-axis intervals
/// with centers s^(nu_j), plus the concentric 3-dilates.
struct LocalizationGrid {
  IntervalSequence axis;          // shared by every local coordinate
  int k;                          // number of global coordinates
  int n;                          // total dimension

  int local_dims() const { return n - k; }
  /// center of C_nu
  Eigen::VectorXd cell_center(const std::vector<long>& nu) const;
  /// half-widths of C_nu per axis
  Eigen::VectorXd cell_half_width(const std::vector<long>& nu) const;
  bool in_cell(const std::vector<long>& nu, const Eigen::VectorXd& x_loc, double dilate = 1.0) const;
};

/// Membership in M_k with the fixed coordinate order: the global condition
/// |x_j - u_j| > 1/(1+|x_j|) must hold for j < k and the local condition
/// (<=) for j >= k.
bool membership_mk(const Eigen::VectorXd& x, const Eigen::VectorXd& u, int k);

/// The unique class of (x, u) after sorting global coordinates first:
/// k is the number of global coordinates and perm the stable permutation
/// (global indices in order, then local indices) that reduces the pair to
/// the fixed ordering.
struct MkClass {
  int k;
  std::vector<int> perm;
};
MkClass classify_mk(const Eigen::VectorXd& x, const Eigen::VectorXd& u);

/// The interval implication: s' in I_s and |s'' - s'| <= 1/(1+|s'|) forces
/// s'' into the 3-dilate of I_s. Returns whether the premise holds and, if
/// so, whether the conclusion does (it always must).
struct ImplCheck {
  bool premise;
  bool conclusion;
};
ImplCheck check_impl(double s, double s_prime, double s_second);

/// Extremes of exp(sum_j lambda_j u_j^2 - D_nu) over a grid of u in the
/// 3-dilated cell, where D_nu = sum_j lambda_j (s^(nu_j))^2. The local rates
/// are those of the local coordinates.
std::pair<double, double> density_comparability(const std::vector<long>& nu,
                                                const SpectralParams& local_rates,
                                                int grid_per_axis = 16);

// ---------------------------------------------------------------------------
// polar-like coordinates and tubes

/// R(xi) = sum_j lambda_j xi_j^2.
double quadratic_form(const SpectralParams& rates, const Eigen::VectorXd& xi);

/// Anisotropic dilation (e^{lambda_j s} xi_j)_j.
Eigen::VectorXd aniso_dilate(const SpectralParams& rates, double s, const Eigen::VectorXd& xi);

/// The unique factorization xi = e^{lambda s} xi_tilde with xi_tilde on the
/// ellipsoid R = beta.
struct PolarPoint {
  double s;
  Eigen::VectorXd xi_tilde;
  double beta;
};
PolarPoint polar_decompose(const SpectralParams& rates, const Eigen::VectorXd& xi, double beta);
Eigen::VectorXd polar_compose(const SpectralParams& rates, const PolarPoint& p);

/// Exact volume element of the (s, xi_tilde) coordinates:
///   d(xi) = e^{(sum_j lambda_j) s} |(lambda_j xi_tilde_j)_j| ds dS(xi_tilde).
double lebesgue_jacobian_exact(const SpectralParams& rates, const PolarPoint& p);
/// The comparison factor |e^{lambda s} xi_tilde| the measure is equivalent to.
double lebesgue_jacobian_factor(const SpectralParams& rates, const PolarPoint& p);

/// cos of the angle between the normal of the dilated ellipsoid slice and
/// the dilation direction at e^{lambda s} xi; always in (0, 1].
double transversality_cos(const SpectralParams& rates, double s, const Eigen::VectorXd& xi);

/// Tube over a spherical cap of the ellipsoid R = beta: center on the
/// ellipsoid, cap radius a, dilation parameter s > 0.
struct TubeSpec {
  SpectralParams rates;
  double beta;
  Eigen::VectorXd center;
  double a;
};

struct MeasureEstimate {
  double value;
  double std_error;
};

/// exp(-R) measure of the tube by the slice parametrization with the exact
/// Jacobian. Supported for k in {1, 2, 3}.
MeasureEstimate tube_measure_quadrature(const TubeSpec& spec, int resolution = 400);
/// Same measure by importance-sampled Monte Carlo in ambient coordinates
/// (uniform proposal over a bounding box, weight exp(-R)).
MeasureEstimate tube_measure_montecarlo(const TubeSpec& spec, long budget, std::uint64_t seed);

/// Membership of an ambient point in the tube.
bool tube_contains(const TubeSpec& spec, const Eigen::VectorXd& xi);

// ---------------------------------------------------------------------------
// inequality verification

/// Margin report of a sampled inequality. For inequalities with an explicit
/// constant, min_margin must be >= 0 at every sample. For inequalities with
/// an existential constant, inf_ratio is the observed infimum of the ratio
/// bounded away from zero, together with its value at half the budget so
/// stability under doubling can be asserted.
struct MarginReport {
  std::string lemma_id;
  bool explicit_constant;
  long samples;
  double min_margin;         // explicit form: min over samples (>= 0 expected)
  double inf_ratio;          // empirical form: inf of the bounded-away ratio
  double inf_ratio_half;     // same at half budget
  std::vector<double> witness;  // argmin sample, flattened
};

/// Known lemma ids: "local-bound-chain", "lemma-3.1", "lemma-4.1",
/// "claim-4.3", "lemma-4.2a", "lemma-4.2b", "stima-t", "area-bound".
MarginReport verify_inequality(const std::string& lemma_id, long budget,
                               const SpectralParams& rates, std::uint64_t seed);

}  // namespace ousg
