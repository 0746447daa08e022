#include "ousg/weaktype.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ousg/math_util.hpp"
#include "ousg/parallel.hpp"
#include "ousg/rng.hpp"

namespace ousg {

// ---------------------------------------------------------------------------
// test functions

TestFunction TestFunction::gaussian_bump(const Eigen::VectorXd& center, double width) {
  return gaussian_bumps({center}, {1.0}, width);
}

TestFunction TestFunction::gaussian_bumps(std::vector<Eigen::VectorXd> centers,
                                          std::vector<double> masses, double width) {
  if (centers.empty() || centers.size() != masses.size())
    throw Error(ErrorCode::ConfigParse, "bump mixture needs matching centers and masses");
  TestFunction f;
  f.kind = Kind::GaussianBump;
  f.centers = std::move(centers);
  f.masses = std::move(masses);
  f.width = width;
  int n = f.dim();
  Eigen::VectorXd lo = f.centers[0], hi = f.centers[0];
  for (const auto& c : f.centers) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  f.support.lo = lo - Eigen::VectorXd::Constant(n, 6.0 * width);
  f.support.hi = hi + Eigen::VectorXd::Constant(n, 6.0 * width);
  return f;
}

TestFunction TestFunction::indicator_box(const Eigen::VectorXd& center, double half_width) {
  TestFunction f;
  f.kind = Kind::IndicatorBox;
  f.centers = {center};
  f.masses = {1.0};
  f.width = half_width;
  int n = static_cast<int>(center.size());
  f.support.lo = center - Eigen::VectorXd::Constant(n, half_width);
  f.support.hi = center + Eigen::VectorXd::Constant(n, half_width);
  return f;
}

TestFunction TestFunction::atom_cloud(std::vector<Eigen::VectorXd> centers,
                                      std::vector<double> masses) {
  if (centers.empty() || centers.size() != masses.size())
    throw Error(ErrorCode::ConfigParse, "atom cloud needs matching centers and masses");
  TestFunction f;
  f.kind = Kind::AtomCloud;
  f.centers = std::move(centers);
  f.masses = std::move(masses);
  int n = f.dim();
  Eigen::VectorXd lo = f.centers[0], hi = f.centers[0];
  for (const auto& c : f.centers) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  f.support.lo = lo - Eigen::VectorXd::Constant(n, 1e-9);
  f.support.hi = hi + Eigen::VectorXd::Constant(n, 1e-9);
  return f;
}

void TestFunction::normalize(const SpectralParams& rates, int k) {
  int n = dim();
  if (rates.dim() < k) throw Error(ErrorCode::DimensionMismatch, "rates vs global count");
  if (kind == Kind::AtomCloud) {
    double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::ConfigParse, "atom masses must be positive");
    for (double& m : masses) m /= total;
    normalization = 1.0;
    return;
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Eigen::VectorXd& c = centers[i];
    double term = masses.empty() ? 1.0 : masses[i];
    if (kind == Kind::GaussianBump) {
      double a = 1.0 / (2.0 * width * width);
      for (int j = 0; j < n; ++j) {
        if (j < k) {
          double lam = rates.lambda(j);
          term *= std::sqrt(lam / (a + lam)) * std::exp(-a * lam * c(j) * c(j) / (a + lam));
        } else {
          term *= std::sqrt(M_PI / a);
        }
      }
    } else {
      for (int j = 0; j < n; ++j) {
        if (j < k) {
          double sl = std::sqrt(rates.lambda(j));
          term *= 0.5 * (std::erf(sl * (c(j) + width)) - std::erf(sl * (c(j) - width)));
        } else {
          term *= 2.0 * width;
        }
      }
    }
    integral += term;
  }
  if (!(integral > 0.0)) throw Error(ErrorCode::ConfigParse, "degenerate test function");
  normalization = 1.0 / integral;
}

double TestFunction::value(const Eigen::VectorXd& u) const {
  if (kind == Kind::AtomCloud)
    throw Error(ErrorCode::ConfigParse, "atom cloud is a measure, not a density");
  double acc = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Eigen::VectorXd& c = centers[i];
    double m = masses.empty() ? 1.0 : masses[i];
    if (kind == Kind::GaussianBump) {
      double a = 1.0 / (2.0 * width * width);
      acc += m * std::exp(-a * (u - c).squaredNorm());
    } else {
      bool inside = true;
      for (int j = 0; j < u.size(); ++j)
        if (std::abs(u(j) - c(j)) > width) inside = false;
      if (inside) acc += m;
    }
  }
  return normalization * acc;
}

namespace {

// per-axis closed form of the kappa-damped kernel against a Gaussian factor
// exp(-a (u-c)^2) and the invariant weight: collecting the quadratic in u,
//   A = kappa lam sig^2 / d + a + lam,  b = kappa lam sig x / d + a c,
// the axis integral is sqrt(lam/A) exp(lam x^2 - log(d)/2 + b^2/A
//                                      - kappa lam x^2 / d - a c^2).
double log_axis_bump(double lam, double kappa, double t, double x, double a, double c) {
  double d = -std::expm1(-2.0 * lam * t);
  double sig = std::exp(-lam * t);
  double A = kappa * lam * sig * sig / d + a + lam;
  double b = kappa * lam * sig * x / d + a * c;
  return lam * x * x - 0.5 * std::log(d) + 0.5 * std::log(lam / A) + b * b / A -
         kappa * lam * x * x / d - a * c * c;
}

// same with the indicator [c-w, c+w] in place of the Gaussian factor
double log_axis_box(double lam, double kappa, double t, double x, double c, double w) {
  double d = -std::expm1(-2.0 * lam * t);
  double sig = std::exp(-lam * t);
  double A = kappa * lam * sig * sig / d + lam;
  double b = kappa * lam * sig * x / d;
  double sa = std::sqrt(A);
  double lo = sa * (c - w - b / A);
  double hi = sa * (c + w - b / A);
  double window = 0.5 * (std::erf(hi) - std::erf(lo));
  if (window <= 0.0) return -std::numeric_limits<double>::infinity();
  return lam * x * x - 0.5 * std::log(d) + 0.5 * std::log(lam / A) + b * b / A -
         kappa * lam * x * x / d + std::log(window);
}

}  // namespace

double TestFunction::ht_value(const SpectralParams& rates, double kappa, const Eigen::VectorXd& x,
                              double t) const {
  int n = dim();
  if (rates.dim() != n || x.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "ht_value dimensions");
  if (kind == Kind::AtomCloud) {
    double acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double log_k = 0.0;
      for (int j = 0; j < n; ++j)
        log_k += log_kernel_1d_kappa(rates.lambda(j), kappa, t, x(j), centers[i](j));
      acc += masses[i] * std::exp(log_k);
    }
    return acc;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Eigen::VectorXd& c = centers[i];
    double log_term = 0.0;
    if (kind == Kind::GaussianBump) {
      double a = 1.0 / (2.0 * width * width);
      for (int j = 0; j < n; ++j)
        log_term += log_axis_bump(rates.lambda(j), kappa, t, x(j), a, c(j));
    } else {
      for (int j = 0; j < n; ++j)
        log_term += log_axis_box(rates.lambda(j), kappa, t, x(j), c(j), width);
    }
    acc += (masses.empty() ? 1.0 : masses[i]) * std::exp(log_term);
  }
  return normalization * acc;
}

// ---------------------------------------------------------------------------
// level-set scans

namespace {

// Per-grid-time constants of the maximal evaluation, hoisted out of the
// sample loop.
struct MaximalEvaluator {
  const SpectralParams& rates;
  const TestFunction& f;
  double kappa;
  std::vector<double> ts;
  std::vector<std::vector<double>> d;      // [t][axis]
  std::vector<std::vector<double>> sigma;  // [t][axis]
  std::vector<double> sum_log_d;

  MaximalEvaluator(const SpectralParams& r, const TestFunction& fn, double kap, const TGrid& grid)
      : rates(r), f(fn), kappa(kap), ts(grid.points()) {
    int n = rates.dim();
    d.resize(ts.size());
    sigma.resize(ts.size());
    sum_log_d.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      d[i].resize(n);
      sigma[i].resize(n);
      double sld = 0.0;
      for (int j = 0; j < n; ++j) {
        d[i][j] = -std::expm1(-2.0 * rates.lambda(j) * ts[i]);
        sigma[i][j] = std::exp(-rates.lambda(j) * ts[i]);
        sld += std::log(d[i][j]);
      }
      sum_log_d[i] = sld;
    }
  }

  // sup over the grid of H_t f(x); stops early once stop_above is exceeded
  double max_value(const Eigen::VectorXd& x, double stop_above) const {
    int n = rates.dim();
    double best = 0.0;
    double rx = 0.0;
    for (int j = 0; j < n; ++j) rx += rates.lambda(j) * x(j) * x(j);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      double v;
      if (f.kind == TestFunction::Kind::AtomCloud) {
        double base = rx - 0.5 * sum_log_d[i];
        double acc = 0.0;
        for (std::size_t m = 0; m < f.centers.size(); ++m) {
          double expo = base;
          for (int j = 0; j < n; ++j) {
            double z = x(j) - sigma[i][j] * f.centers[m](j);
            expo -= kappa * rates.lambda(j) * z * z / d[i][j];
          }
          acc += f.masses[m] * std::exp(expo);
        }
        v = acc;
      } else {
        v = f.ht_value(rates, kappa, x, ts[i]);
      }
      if (v > best) {
        best = v;
        if (best > stop_above) return best;
      }
    }
    return best;
  }
};

}  // namespace

LevelSetReport weak_type_scan(const SpectralParams& rates, const TestFunction& f,
                              const std::vector<double>& alphas, long mc_budget,
                              std::uint64_t seed, double kappa, const TGrid& grid) {
  if (alphas.empty()) throw Error(ErrorCode::ConfigParse, "empty alpha grid");
  std::vector<double> sorted_alphas = alphas;
  std::sort(sorted_alphas.begin(), sorted_alphas.end());
  int n = rates.dim();
  double alpha_max = sorted_alphas.back();
  double ball = 2.0 * std::log(alpha_max);
  double tail = gamma_q(0.5 * n, ball);

  MaximalEvaluator eval(rates, f, kappa, grid);

  const long batches = 256;
  const long per_batch = std::max<long>(1, mc_budget / batches);
  const long total = batches * per_batch;
  std::vector<std::vector<long>> counts(static_cast<std::size_t>(batches),
                                        std::vector<long>(sorted_alphas.size(), 0));

  parallel_for_batches(static_cast<std::size_t>(batches), [&](std::size_t b) {
    CounterRng rng(seed, static_cast<std::uint64_t>(b) + 1);
    Eigen::VectorXd x(n);
    auto& my = counts[b];
    for (long i = 0; i < per_batch; ++i) {
      double r = 0.0;
      for (int j = 0; j < n; ++j) {
        x(j) = rng.normal() / std::sqrt(2.0 * rates.lambda(j));
        r += rates.lambda(j) * x(j) * x(j);
      }
      if (r > ball) continue;  // analytic tail bound covers this region
      double m = eval.max_value(x, alpha_max);
      for (std::size_t a = 0; a < sorted_alphas.size(); ++a) {
        if (m > sorted_alphas[a]) ++my[a];
        else break;  // alphas ascending
      }
    }
  });

  LevelSetReport report;
  report.alphas = sorted_alphas;
  report.tail_bound = tail;
  report.budget = total;
  std::vector<double> log_a, log_q;
  for (std::size_t a = 0; a < sorted_alphas.size(); ++a) {
    long hits = 0;
    for (long b = 0; b < batches; ++b) hits += counts[static_cast<std::size_t>(b)][a];
    double p = static_cast<double>(hits) / static_cast<double>(total);
    double measure = p + tail;
    double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / total) / static_cast<double>(total));
    report.measures.push_back(measure);
    report.std_errors.push_back(se);
    report.quotients.push_back(sorted_alphas[a] * measure);
    log_a.push_back(std::log(sorted_alphas[a]));
    log_q.push_back(std::log(std::max(sorted_alphas[a] * measure, 1e-300)));
  }
  report.slope = ls_slope(log_a, log_q);
  return report;
}

LevelSetReport kappa_weak_type_scan(const KernelSpec& spec, const TestFunction& f,
                                    const std::vector<double>& alphas, long mc_budget,
                                    std::uint64_t seed, const TGrid& grid) {
  return weak_type_scan(spec.params, f, alphas, mc_budget, seed, spec.kappa, grid);
}

// ---------------------------------------------------------------------------
// large-t analyzer

double salpha_solve(const SpectralParams& rates, const Eigen::VectorXd& xi_tilde, double integral,
                    double alpha) {
  if (!(integral > 0.0)) throw Error(ErrorCode::NoRoot, "smoothed profile vanishes at xi_tilde");
  if (!(alpha > integral)) throw Error(ErrorCode::NoRoot, "alpha below the profile value");
  double target = std::log(alpha / integral);
  auto g = [&](double s) { return quadratic_form(rates, aniso_dilate(rates, s, xi_tilde)); };
  return bisect_monotone(g, target, -1.0, 1.0, 1e-13);
}

double large_alpha_threshold(const SpectralParams& rates) {
  return std::exp(static_cast<double>(rates.dim()) * rates.lambda_max() / rates.lambda_min());
}

LargeTReport large_t_levelset(const SpectralParams& rates, const TestFunction& f, double alpha,
                              long mc_budget, std::uint64_t seed, double c_smooth,
                              double cell_volume) {
  if (f.kind != TestFunction::Kind::AtomCloud)
    throw Error(ErrorCode::ConfigParse, "large-t analyzer expects an atom cloud");
  int k = rates.dim();
  // boundary equality is admissible: the dilation integral already converges
  // once 2 lambda_min log(alpha) exceeds k lambda_max
  if (alpha < large_alpha_threshold(rates) * (1.0 - 1e-12))
    throw Error(ErrorCode::AlphaTooSmall, "alpha below the large-alpha threshold");
  double beta = std::log(alpha);

  // atoms projected to the ellipsoid
  std::vector<Eigen::VectorXd> proj;
  proj.reserve(f.centers.size());
  for (const auto& c : f.centers) proj.push_back(polar_decompose(rates, c, beta).xi_tilde);

  double q_lo = gamma_q(0.5 * k, 0.5 * beta);
  double q_hi = gamma_q(0.5 * k, 2.0 * beta);
  double p_annulus = q_lo - q_hi;

  const long batches = 128;
  const long per_batch = std::max<long>(1, mc_budget / batches);
  const long total = batches * per_batch;
  std::vector<long> hits(static_cast<std::size_t>(batches), 0);

  parallel_for_batches(static_cast<std::size_t>(batches), [&](std::size_t b) {
    CounterRng rng(seed, static_cast<std::uint64_t>(b) + 1);
    Eigen::VectorXd y(k), xi(k);
    long my = 0;
    for (long i = 0; i < per_batch; ++i) {
      // radial level from the truncated Gamma(k/2) law of R
      double u = rng.uniform();
      double r_level;
      if (k == 2) {
        r_level = -std::log(std::exp(-0.5 * beta) - u * (std::exp(-0.5 * beta) - std::exp(-2.0 * beta)));
      } else {
        double target = q_lo - u * p_annulus;
        r_level = bisect_monotone([&](double r) { return -gamma_q(0.5 * k, r); }, -target,
                                  0.5 * beta, 2.0 * beta, 1e-10);
      }
      double norm2 = 0.0;
      for (int j = 0; j < k; ++j) {
        y(j) = rng.normal();
        norm2 += y(j) * y(j);
      }
      double scale = std::sqrt(r_level / norm2);
      for (int j = 0; j < k; ++j) xi(j) = scale * y(j) / std::sqrt(rates.lambda(j));
      PolarPoint p = polar_decompose(rates, xi, beta);
      double g = 0.0;
      for (std::size_t m = 0; m < proj.size(); ++m)
        g += f.masses[m] * std::exp(-c_smooth * (p.xi_tilde - proj[m]).squaredNorm());
      if (std::exp(r_level) * g > alpha) ++my;
    }
    hits[b] = my;
  });

  long hit_total = std::accumulate(hits.begin(), hits.end(), 0L);
  double frac = static_cast<double>(hit_total) / static_cast<double>(total);
  double se_frac = std::sqrt(std::max(frac * (1.0 - frac), 1.0 / total) / static_cast<double>(total));
  LargeTReport report;
  report.alpha = alpha;
  report.measure = p_annulus * frac * cell_volume;
  report.std_error = p_annulus * se_frac * cell_volume;
  report.quotient = alpha * report.measure;
  report.budget = total;
  return report;
}

// ---------------------------------------------------------------------------
// small-t machinery

int dyadic_index(double v) {
  if (v <= 1.0) return 0;
  return static_cast<int>(std::ceil(std::log2(v)));
}

SpectralParams SmallTSlot::global_rates() const {
  std::vector<double> lams(rates.lambdas().begin(), rates.lambdas().begin() + k);
  return SpectralParams(lams);
}

Eigen::VectorXd SmallTSlot::cell_center() const {
  Eigen::VectorXd c(n() - k);
  for (int j = 0; j < n() - k; ++j) c(j) = interval_center(nu[static_cast<std::size_t>(j)]);
  return c;
}

Eigen::VectorXd SmallTSlot::cell_half_width() const {
  Eigen::VectorXd h(n() - k);
  for (int j = 0; j < n() - k; ++j)
    h(j) = IntervalSequence::half_width(interval_center(nu[static_cast<std::size_t>(j)]));
  return h;
}

bool SmallTSlot::in_cell(const Eigen::VectorXd& x_loc, double dilate) const {
  Eigen::VectorXd c = cell_center();
  Eigen::VectorXd h = cell_half_width();
  for (int j = 0; j < n() - k; ++j)
    if (std::abs(x_loc(j) - c(j)) > dilate * h(j)) return false;
  return true;
}

bool smm_membership(const SmallTSlot& slot, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    double t, int m1, int m2) {
  if (!(t > 0.0) || t > 1.0) throw Error(ErrorCode::InvalidTime, "small-t regions need 0 < t <= 1");
  int n = slot.n();
  int k = slot.k;
  if (x.size() != n || u.size() != n) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  double gdist2 = 0.0;
  for (int j = 0; j < k; ++j) {
    double z = x(j) - std::exp(-slot.rates.lambda(j) * t) * u(j);
    gdist2 += z * z;
  }
  double sqt = std::sqrt(t);
  if (dyadic_index(std::sqrt(gdist2) / sqt) != m1) return false;
  if (k < n) {
    Eigen::VectorXd x_loc = x.tail(n - k);
    Eigen::VectorXd u_loc = u.tail(n - k);
    if (dyadic_index((x_loc - u_loc).norm() / sqt) != m2) return false;
    if (!slot.in_cell(x_loc, 1.0)) return false;
    if (!slot.in_cell(u_loc, 3.0)) return false;
  } else if (m2 != 0) {
    return false;  // no local coordinates, only the m2 = 0 slot is populated
  }
  return true;
}

double smm_log_kernel(const SmallTSlot& slot, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      double t, int m1, int m2, double c) {
  if (!smm_membership(slot, x, u, t, m1, m2))
    return -std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (int j = 0; j < slot.k; ++j) r += slot.rates.lambda(j) * x(j) * x(j);
  return r - 0.5 * slot.n() * std::log(t) - c * (std::pow(4.0, m1) + std::pow(4.0, m2));
}

double epsilon_bound(const Eigen::VectorXd& xi, int m1, double c_eps) {
  double bound = c_eps / (sq(1.0 + xi.norm()) * std::pow(4.0, m1));
  return std::min(1.0, bound);
}

// ---------------------------------------------------------------------------
// forbidden-zone recursion

namespace {

// disjointness of two axis-aligned ellipsoids { sum ((p_j-c_j)/a_j)^2 <= 1 }:
// minimize the first form over the second ellipsoid and compare with 1
bool ellipsoids_disjoint(const Eigen::VectorXd& c1, const Eigen::VectorXd& a1,
                         const Eigen::VectorXd& c2, const Eigen::VectorXd& a2) {
  int k = static_cast<int>(c1.size());
  Eigen::VectorXd d(k), m(k);
  for (int j = 0; j < k; ++j) {
    d(j) = (c2(j) - c1(j)) / a1(j);
    m(j) = a2(j) / a1(j);
  }
  // unconstrained minimizer w_j = -d_j / m_j
  double unc = 0.0;
  for (int j = 0; j < k; ++j) unc += sq(d(j) / m(j));
  if (unc <= 1.0) return false;  // the minimum 0 is attained inside |w| <= 1
  auto radius2 = [&](double mu) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += sq(m(j) * d(j) / (m(j) * m(j) + mu));
    return acc;
  };
  double lo = 0.0, hi = 1.0;
  while (radius2(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (radius2(mid) > 1.0 ? lo : hi) = mid;
  }
  double mu = 0.5 * (lo + hi);
  double value = 0.0;
  for (int j = 0; j < k; ++j) {
    double w = -m(j) * d(j) / (m(j) * m(j) + mu);
    value += sq(d(j) + m(j) * w);
  }
  return value > 1.0;
}

struct ZoneGeometry {
  SpectralParams global;   // first k rates
  double beta;
  Eigen::VectorXd cap_center;
  double cap_radius;
  Eigen::VectorXd loc_center;
  double loc_radius;
};

bool zone_contains(const ZoneGeometry& z, const Eigen::VectorXd& xi, const Eigen::VectorXd& x_loc) {
  if ((x_loc - z.loc_center).norm() >= z.loc_radius) return false;
  if (quadratic_form(z.global, xi) < 1e-300) return false;
  PolarPoint p = polar_decompose(z.global, xi, z.beta);
  if (p.s < -1e-12) return false;
  return (p.xi_tilde - z.cap_center).norm() < z.cap_radius;
}

// Lebesgue volume of the Euclidean ball (center, radius) intersected with
// the box [c-3h, c+3h]; exact for dimension <= 1, midpoint grid above.
double ball_box_volume(const Eigen::VectorXd& center, double radius, const Eigen::VectorXd& box_c,
                       const Eigen::VectorXd& box_h) {
  int d = static_cast<int>(center.size());
  if (d == 0) return 1.0;
  if (d == 1) {
    double lo = std::max(center(0) - radius, box_c(0) - 3.0 * box_h(0));
    double hi = std::min(center(0) + radius, box_c(0) + 3.0 * box_h(0));
    return std::max(0.0, hi - lo);
  }
  const int res = 96;
  Eigen::VectorXd lo(d), hi(d);
  double cell = 1.0;
  for (int j = 0; j < d; ++j) {
    lo(j) = std::max(center(j) - radius, box_c(j) - 3.0 * box_h(j));
    hi(j) = std::min(center(j) + radius, box_c(j) + 3.0 * box_h(j));
    if (hi(j) <= lo(j)) return 0.0;
    cell *= (hi(j) - lo(j)) / res;
  }
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  long inside = 0;
  Eigen::VectorXd p(d);
  for (;;) {
    for (int j = 0; j < d; ++j)
      p(j) = lo(j) + (hi(j) - lo(j)) * (idx[static_cast<std::size_t>(j)] + 0.5) / res;
    if ((p - center).norm() < radius) ++inside;
    int j = 0;
    while (j < d && ++idx[static_cast<std::size_t>(j)] == res) {
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == d) break;
  }
  return cell * static_cast<double>(inside);
}

}  // namespace

ForbiddenZoneRun forbidden_zone_recursion(const RecursionConfig& config) {
  const SmallTSlot& slot = config.slot;
  int n = slot.n();
  int k = slot.k;
  if (k < 1 || k > n) throw Error(ErrorCode::ConfigParse, "recursion needs 1 <= k <= n");
  if (config.f.kind != TestFunction::Kind::AtomCloud)
    throw Error(ErrorCode::ConfigParse, "recursion runs on a discretized (atom) test function");
  SpectralParams global = slot.global_rates();
  double c_eff = config.c > 0.0 ? config.c : slot.rates.lambda_min() / 8.0;
  double constant_a = 2.0 * std::exp(slot.rates.lambda_max()) * std::sqrt(config.big_m);
  double constant_b = 2.0 * std::sqrt(config.big_m);
  double alpha = config.alpha;
  if (!(alpha > large_alpha_threshold(global)))
    throw Error(ErrorCode::AlphaTooSmall, "alpha below the large-alpha threshold");
  double beta = std::log(alpha);

  // grid over the annulus in the global coordinates
  std::vector<Eigen::VectorXd> global_pts;
  {
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    Eigen::VectorXd xi(k);
    for (;;) {
      for (int j = 0; j < k; ++j) {
        double extent = std::sqrt(2.0 * beta / global.lambda(j));
        xi(j) = -extent + 2.0 * extent * (idx[static_cast<std::size_t>(j)] + 0.5) / config.grid_global;
      }
      double r = quadratic_form(global, xi);
      if (r >= 0.5 * beta && r <= 2.0 * beta) global_pts.push_back(xi);
      int j = 0;
      while (j < k && ++idx[static_cast<std::size_t>(j)] == config.grid_global) {
        idx[static_cast<std::size_t>(j)] = 0;
        ++j;
      }
      if (j == k) break;
    }
  }
  // grid over the local cell
  std::vector<Eigen::VectorXd> local_pts;
  if (k < n) {
    Eigen::VectorXd c = slot.cell_center();
    Eigen::VectorXd h = slot.cell_half_width();
    std::vector<int> idx(static_cast<std::size_t>(n - k), 0);
    Eigen::VectorXd xl(n - k);
    for (;;) {
      for (int j = 0; j < n - k; ++j)
        xl(j) = c(j) - h(j) + 2.0 * h(j) * (idx[static_cast<std::size_t>(j)] + 0.5) / config.grid_local;
      local_pts.push_back(xl);
      int j = 0;
      while (j < n - k && ++idx[static_cast<std::size_t>(j)] == config.grid_local) {
        idx[static_cast<std::size_t>(j)] = 0;
        ++j;
      }
      if (j == n - k) break;
    }
  } else {
    local_pts.emplace_back(0);
  }

  struct GridPoint {
    Eigen::VectorXd x;
    double r;
    double f_max;       // sup over t of the kernel integral
    double t_star;
    bool in_zone = false;
  };
  std::vector<GridPoint> grid;
  grid.reserve(global_pts.size() * local_pts.size());
  const double shell_factor = std::exp(-c_eff * (std::pow(4.0, config.m1) + std::pow(4.0, config.m2)));
  for (const auto& xi : global_pts) {
    for (const auto& xl : local_pts) {
      GridPoint gp;
      gp.x = Eigen::VectorXd(n);
      gp.x.head(k) = xi;
      if (k < n) gp.x.tail(n - k) = xl;
      gp.r = quadratic_form(global, xi);
      double eps = epsilon_bound(xi, config.m1, config.c_eps);
      double best = 0.0, best_t = eps;
      for (int it = 0; it < config.t_points; ++it) {
        double frac = config.t_points == 1
                          ? 1.0
                          : static_cast<double>(it) / (config.t_points - 1);
        double t = std::min(1.0, std::exp(std::log(eps) * (1.0 - frac)));
        double mass = 0.0;
        for (std::size_t m = 0; m < config.f.centers.size(); ++m) {
          if (smm_membership(slot, gp.x, config.f.centers[m], t, config.m1, config.m2))
            mass += config.f.masses[m];
        }
        if (mass == 0.0) continue;
        double v = std::exp(gp.r) * std::pow(t, -0.5 * n) * shell_factor * mass;
        if (v > best) {
          best = v;
          best_t = t;
        }
      }
      gp.f_max = best;
      gp.t_star = best_t;
      grid.push_back(std::move(gp));
    }
  }

  ForbiddenZoneRun run{config,
                       constant_a,
                       constant_b,
                       c_eff,
                       {},
                       true,
                       true,
                       true,
                       static_cast<long>(grid.size()),
                       0};
  for (const auto& gp : grid)
    if (gp.f_max >= alpha) ++run.level_set_points;

  std::vector<ZoneGeometry> zones;
  long guard = 0;
  for (;;) {
    if (++guard > 1000000) throw Error(ErrorCode::NonTermination, "selection guard tripped");
    long pick = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].in_zone || grid[i].f_max < alpha) continue;
      if (pick < 0 || grid[i].r < grid[static_cast<std::size_t>(pick)].r) pick = static_cast<long>(i);
    }
    if (pick < 0) break;
    GridPoint& sel = grid[static_cast<std::size_t>(pick)];
    double t_l = sel.t_star;
    double sqt = std::sqrt(t_l);
    ZoneRecord rec;
    rec.x = sel.x;
    rec.t = t_l;
    rec.r_level = sel.r;
    rec.b_global_radius = std::pow(2.0, config.m1) * sqt;
    rec.b_local_radius = std::pow(2.0, config.m2) * sqt;
    rec.z_cap_radius = constant_a * std::pow(2.0, 3 * config.m1) * sqt;
    rec.z_local_radius = constant_b * std::pow(2.0, 2 * config.m1 + config.m2) * sqt;

    ZoneGeometry z{global,
                   rec.r_level,
                   Eigen::VectorXd(sel.x.head(k)),
                   rec.z_cap_radius,
                   k < n ? Eigen::VectorXd(sel.x.tail(n - k)) : Eigen::VectorXd(0),
                   k < n ? rec.z_local_radius : 1.0};

    // mark everything the zone forbids
    for (auto& gp : grid) {
      if (gp.in_zone) continue;
      Eigen::VectorXd xi = gp.x.head(k);
      Eigen::VectorXd xl = k < n ? Eigen::VectorXd(gp.x.tail(n - k)) : Eigen::VectorXd(0);
      if (zone_contains(z, xi, xl)) gp.in_zone = true;
    }
    if (!sel.in_zone)
      throw Error(ErrorCode::GridTooCoarse, "selected point escapes its own forbidden zone");

    // zone measure and B mass
    TubeSpec tube{global, rec.r_level, z.cap_center, rec.z_cap_radius};
    double norm = std::pow(M_PI, -0.5 * k);
    for (int j = 0; j < k; ++j) norm *= std::sqrt(global.lambda(j));
    double global_measure = norm * tube_measure_quadrature(tube).value;
    double local_measure = 1.0;
    if (k < n)
      local_measure = ball_box_volume(z.loc_center, rec.z_local_radius, slot.cell_center(),
                                      slot.cell_half_width());
    rec.zone_measure = global_measure * local_measure;

    double mass = 0.0;
    for (std::size_t m = 0; m < config.f.centers.size(); ++m) {
      const Eigen::VectorXd& atom = config.f.centers[m];
      double gdist2 = 0.0;
      for (int j = 0; j < k; ++j) {
        double zz = sel.x(j) - std::exp(-global.lambda(j) * t_l) * atom(j);
        gdist2 += zz * zz;
      }
      if (std::sqrt(gdist2) > rec.b_global_radius) continue;
      if (k < n) {
        Eigen::VectorXd aloc = atom.tail(n - k);
        if ((aloc - z.loc_center).norm() > rec.b_local_radius) continue;
        if (!slot.in_cell(aloc, 3.0)) continue;
      }
      mass += config.f.masses[m];
    }
    rec.b_mass = mass;
    rec.bound_ratio =
        mass > 0.0 ? rec.zone_measure * alpha / (shell_factor * mass)
                   : std::numeric_limits<double>::infinity();
    run.zones.push_back(std::move(rec));
  }

  // verdicts -----------------------------------------------------------
  run.r_monotone = true;
  for (std::size_t l = 1; l < run.zones.size(); ++l)
    if (run.zones[l].r_level < run.zones[l - 1].r_level - 1e-12) run.r_monotone = false;

  run.covered = true;
  for (const auto& gp : grid)
    if (gp.f_max >= alpha && !gp.in_zone) run.covered = false;

  run.disjoint = true;
  for (std::size_t a = 0; a < run.zones.size() && run.disjoint; ++a) {
    for (std::size_t b = a + 1; b < run.zones.size() && run.disjoint; ++b) {
      const ZoneRecord& za = run.zones[a];
      const ZoneRecord& zb = run.zones[b];
      // global projections of the B sets are axis-aligned ellipsoids
      Eigen::VectorXd ca(k), aa(k), cb(k), ab(k);
      for (int j = 0; j < k; ++j) {
        double ea = std::exp(global.lambda(j) * za.t);
        double eb = std::exp(global.lambda(j) * zb.t);
        ca(j) = ea * za.x(j);
        aa(j) = ea * za.b_global_radius;
        cb(j) = eb * zb.x(j);
        ab(j) = eb * zb.b_global_radius;
      }
      bool glob_dis = ellipsoids_disjoint(ca, aa, cb, ab);
      bool loc_dis = false;
      if (k < n) {
        double dist = (za.x.tail(n - k) - zb.x.tail(n - k)).norm();
        loc_dis = dist >= za.b_local_radius + zb.b_local_radius;
      }
      if (!glob_dis && !loc_dis) run.disjoint = false;
    }
  }
  return run;
}

}  // namespace ousg
