#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ousg/geometry.hpp"
#include "ousg/mehler.hpp"
#include "ousg/model.hpp"
#include "ousg/semigroup.hpp"

namespace ousg {

/// Nonnegative test density, normalized so the L1 norm against the working
/// Gaussian measure is 1. Atom clouds are finite measures (mass at points);
/// bumps and boxes are densities with a declared support box.
struct TestFunction {
  enum class Kind { GaussianBump, IndicatorBox, AtomCloud };

  Kind kind;
  std::vector<Eigen::VectorXd> centers;  // one for bump/box, many for atoms
  std::vector<double> masses;            // atom masses, sum 1 after normalize
  double width = 1.0;                    // bump scale / box half-width
  double normalization = 1.0;
  SupportBox support;

  static TestFunction gaussian_bump(const Eigen::VectorXd& center, double width);
  static TestFunction gaussian_bumps(std::vector<Eigen::VectorXd> centers,
                                     std::vector<double> masses, double width);
  static TestFunction indicator_box(const Eigen::VectorXd& center, double half_width);
  static TestFunction atom_cloud(std::vector<Eigen::VectorXd> centers, std::vector<double> masses);

  int dim() const { return static_cast<int>(centers.at(0).size()); }

  /// Scales the function so its L1 norm against gamma^k (first k axes
  /// Gaussian with the given rates, remaining axes Lebesgue) equals 1.
  void normalize(const SpectralParams& rates, int k);

  /// Pointwise density value (not defined for atom clouds).
  double value(const Eigen::VectorXd& u) const;

  /// Closed-form application of the kappa-damped diagonal kernel:
  /// the integral of K^kappa_t(x, u) f(u) against gamma_infty.
  double ht_value(const SpectralParams& rates, double kappa, const Eigen::VectorXd& x,
                  double t) const;
};

/// Level-set scan output: per-alpha measures of {H_* f > alpha}, their
/// quotients alpha * measure, and the least-squares slope of log-quotient
/// against log-alpha.
struct LevelSetReport {
  std::vector<double> alphas;
  std::vector<double> measures;
  std::vector<double> std_errors;
  std::vector<double> quotients;
  double slope;
  double tail_bound;  // analytic mass outside the sampling ball, added in
  long budget;
};

/// Estimates gamma_infty{ H_* f > alpha } for every alpha by Monte Carlo
/// over gamma_infty restricted to the ball R(x) <= 2 log(max alpha), with
/// the analytic tail bound added. kappa damps the kernel (1 = plain).
LevelSetReport weak_type_scan(const SpectralParams& rates, const TestFunction& f,
                              const std::vector<double>& alphas, long mc_budget,
                              std::uint64_t seed, double kappa = 1.0,
                              const TGrid& grid = TGrid::standard());

/// Same scan with the kappa of the kernel spec.
LevelSetReport kappa_weak_type_scan(const KernelSpec& spec, const TestFunction& f,
                                    const std::vector<double>& alphas, long mc_budget,
                                    std::uint64_t seed, const TGrid& grid = TGrid::standard());

/// Root s_alpha of exp(R(e^{lambda s} xi_tilde)) * integral = alpha; the
/// integral is s-independent and must be in (0, alpha). Throws NoRoot when
/// the integral vanishes.
double salpha_solve(const SpectralParams& rates, const Eigen::VectorXd& xi_tilde, double integral,
                    double alpha);

/// Smallest alpha the large-t analyzer accepts for the given data:
/// lambda_min log(alpha) > k lambda_max plus a nonempty annulus.
double large_alpha_threshold(const SpectralParams& rates);

struct LargeTReport {
  double alpha;
  double measure;
  double std_error;
  double quotient;  // alpha * measure
  long budget;
};

/// Measure of the large-t dominating set: points (xi, x_loc) of the annulus
/// times the cell with exp(R(xi)) * g(xi_tilde) > alpha, where g is the
/// Gaussian-smoothed global profile of f with exponent c_smooth. f must be
/// an atom cloud over the k global coordinates; cell_volume is the Lebesgue
/// volume of the local cell.
LargeTReport large_t_levelset(const SpectralParams& rates, const TestFunction& f, double alpha,
                              long mc_budget, std::uint64_t seed, double c_smooth,
                              double cell_volume = 1.0);

// ---------------------------------------------------------------------------
// small-t machinery

/// Dyadic shell index of v = distance / sqrt(t): 0 when v <= 1, otherwise
/// the m with 2^{m-1} < v <= 2^m.
int dyadic_index(double v);

/// Geometry of one (k, nu) localization slot in dimension n.
struct SmallTSlot {
  SpectralParams rates;  // all n rates, global coordinates first
  int k;
  std::vector<long> nu;  // local cell index, size n - k

  int n() const { return rates.dim(); }
  SpectralParams global_rates() const;
  Eigen::VectorXd cell_center() const;
  Eigen::VectorXd cell_half_width() const;
  bool in_cell(const Eigen::VectorXd& x_loc, double dilate) const;
};

/// Membership of (x, u) in the dyadic region S^{m1,m2}_t of the slot.
bool smm_membership(const SmallTSlot& slot, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    double t, int m1, int m2);

/// log of the dominating kernel exp(R(xi)) t^{-n/2} e^{-c 4^{m1} - c 4^{m2}}
/// on its region (minus infinity outside).
double smm_log_kernel(const SmallTSlot& slot, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      double t, int m1, int m2, double c);

/// Lower bound for admissible t implied by (1+|xi|)^2 4^{m1} t >= c_eps,
/// clamped to 1.
double epsilon_bound(const Eigen::VectorXd& xi, int m1, double c_eps = 1.0);

// ---------------------------------------------------------------------------
// forbidden-zone recursion

struct RecursionConfig {
  SmallTSlot slot;
  TestFunction f;  // atom cloud over R^k x (3 cell)
  double alpha;
  int m1 = 0;
  int m2 = 0;
  double big_m = 2.0;   // A = 2 e^{lambda_max} sqrt(M), B = 2 sqrt(M)
  double c = -1.0;      // kernel exponent constant; < 0 selects lambda_min/8
  double c_eps = 1.0;
  int grid_global = 200;  // points per global axis
  int grid_local = 20;    // points per local axis
  int t_points = 48;
};

struct ZoneRecord {
  Eigen::VectorXd x;      // selected point (xi, x_loc)
  double t;               // maximizing time
  double r_level;         // R(xi)
  double b_global_radius;  // 2^{m1} sqrt(t)
  double b_local_radius;   // 2^{m2} sqrt(t)
  double z_cap_radius;     // A 2^{3 m1} sqrt(t)
  double z_local_radius;   // B 2^{2 m1 + m2} sqrt(t)
  double zone_measure;     // gamma^k measure of the forbidden zone
  double b_mass;           // f mass inside B
  double bound_ratio;      // zone_measure * alpha / (e^{-c(4^m1+4^m2)} b_mass)
};

struct ForbiddenZoneRun {
  RecursionConfig config;
  double constant_a;
  double constant_b;
  double c_effective;
  std::vector<ZoneRecord> zones;
  bool disjoint;        // the B sets are pairwise disjoint
  bool covered;         // every grid point of the level set lies in some zone
  bool r_monotone;      // R(xi^(l)) nondecreasing in l
  long grid_points;     // size of the scanned grid
  long level_set_points;
};

/// The selection recursion on a finite grid of the annulus-times-cell
/// region: repeatedly pick the grid argmin of R(xi) among points with
/// sup_{t in [eps,1]} integral >= alpha outside all previous zones, record
/// the zone data, and verify disjointness, coverage and per-zone measure
/// bounds afterwards.
ForbiddenZoneRun forbidden_zone_recursion(const RecursionConfig& config);

}  // namespace ousg
