#include <doctest.h>

#include <cmath>

#include "ousg/mehler.hpp"
#include "ousg/rng.hpp"

using namespace ousg;

namespace {

// Independent route: eigenfunction expansion of the 1D kernel,
//   sum_m e^{-lambda m t} H_m(sqrt(lambda) x) H_m(sqrt(lambda) u) / (2^m m!)
// with physicists' Hermite polynomials, run through the orthonormalized
// recurrence h_m = H_m / sqrt(2^m m!) so nothing overflows:
//   h_{m+1} = x sqrt(2/(m+1)) h_m - sqrt(m/(m+1)) h_{m-1}.
double kernel_1d_hermite_series(double lambda, double t, double x, double u, int terms = 400) {
  double a = std::sqrt(lambda) * x;
  double b = std::sqrt(lambda) * u;
  double rho = std::exp(-lambda * t);
  double ha_prev = 1.0, hb_prev = 1.0;                        // h_0
  double ha = a * std::sqrt(2.0), hb = b * std::sqrt(2.0);    // h_1
  double acc = 1.0 + rho * ha * hb;
  double rho_m = rho;
  for (int m = 1; m + 1 < terms; ++m) {
    double ha_next = a * std::sqrt(2.0 / (m + 1)) * ha - std::sqrt(m / (m + 1.0)) * ha_prev;
    double hb_next = b * std::sqrt(2.0 / (m + 1)) * hb - std::sqrt(m / (m + 1.0)) * hb_prev;
    ha_prev = ha;
    hb_prev = hb;
    ha = ha_next;
    hb = hb_next;
    rho_m *= rho;
    acc += rho_m * ha * hb;
  }
  return acc;
}

}  // namespace

TEST_CASE("1D kernel special values") {
  // x = u = 0
  CHECK(kernel_1d(2.0, 0.4, 0.0, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(-std::expm1(-1.6))).epsilon(1e-14));

  // frozen value at lambda=1, t=ln 2, x=1, u=0: e * (3/4)^{-1/2} * e^{-4/3}
  double expect = std::exp(1.0) * std::sqrt(4.0 / 3.0) * std::exp(-4.0 / 3.0);
  CHECK(kernel_1d(1.0, std::log(2.0), 1.0, 0.0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("1D kernel agrees with the Hermite eigenfunction series") {
  CounterRng rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    double lambda = rng.uniform(0.5, 2.0);
    double t = rng.uniform(0.4, 3.0);
    double x = rng.uniform(-2.0, 2.0);
    double u = rng.uniform(-2.0, 2.0);
    double direct = kernel_1d(lambda, t, x, u);
    double series = kernel_1d_hermite_series(lambda, t, x, u);
    CHECK(direct == doctest::Approx(series).epsilon(1e-10));
  }
}

TEST_CASE("long-time limit is the constant kernel") {
  for (double x : {-3.0, 0.0, 1.5, 3.0})
    for (double u : {-3.0, -0.5, 2.0})
      CHECK(kernel_1d(1.0, 100.0, x, u) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tiny-t evaluation stays finite through expm1") {
  double v = log_kernel_1d(1.0, 1e-15, 0.5, 0.5000001);
  CHECK(std::isfinite(v));
  // 1 - e^{-2t} = 2e-15 to machine accuracy
  CHECK(log_kernel_1d(1.0, 1e-15, 0.0, 0.0) ==
        doctest::Approx(-0.5 * std::log(2e-15)).epsilon(1e-10));
}

TEST_CASE("diagonal kernel tensorizes and is symmetric") {
  SpectralParams params({1.0, 2.0, 0.7});
  CounterRng rng(9, 1);
  for (int i = 0; i < 10000; ++i) {
    double t = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    Eigen::VectorXd x(3), u(3);
    for (int j = 0; j < 3; ++j) {
      x(j) = rng.normal();
      u(j) = rng.normal();
    }
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) sum += log_kernel_1d(params.lambda(j), t, x(j), u(j));
    CHECK(std::abs(log_kernel_diag(params, t, x, u) - sum) <= 1e-13);
    CHECK(log_kernel_diag(params, t, x, u) ==
          doctest::Approx(log_kernel_diag(params, t, u, x)).epsilon(1e-11));
  }
}

TEST_CASE("block kernel: periodic rotation cancels") {
  // q t = 2 pi makes the rotation factor exp(0)
  SpectralParams pair({1.0, 1.0});
  Eigen::Vector2d x(0.3, -1.2), u(0.9, 0.4);
  double with_rotation = log_kernel_block2d(1.0, 2.0 * M_PI, 1.0, x, u);
  double diagonal = log_kernel_diag(pair, 1.0, x, u);
  CHECK(with_rotation == doctest::Approx(diagonal).epsilon(1e-12));
}

TEST_CASE("block kernel: q -> 0 recovers the diagonal kernel") {
  SpectralParams pair({1.3, 1.3});
  Eigen::Vector2d x(0.5, 0.2), u(-0.7, 1.1);
  double small_q = kernel_block2d(1.3, 1e-8, 0.6, x, u);
  double diag = kernel_diag(pair, 0.6, x, u);
  CHECK(small_q == doctest::Approx(diag).epsilon(1e-6));
}

TEST_CASE("block kernel at the origin") {
  Eigen::Vector2d zero(0.0, 0.0);
  double d = -std::expm1(-2.0 * 0.9 * 0.5);
  CHECK(kernel_block2d(0.9, 3.0, 0.5, zero, zero) == doctest::Approx(1.0 / d).epsilon(1e-13));
  CHECK(bound_block2d(0.9, 0.5, zero, zero) == doctest::Approx(1.0 / d).epsilon(1e-13));
}

TEST_CASE("angle reduction keeps huge q t accurate") {
  Eigen::Vector2d x(0.4, 0.1), u(0.2, -0.3);
  double q = 1e8;
  double t = 0.37;
  // the reduced angle equals remainder(q t, 2 pi)
  double angle = std::remainder(q * t, 2.0 * M_PI);
  double expect = log_kernel_block2d(1.0, angle / t, t, x, u);
  CHECK(log_kernel_block2d(1.0, q, t, x, u) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("block bound dominates the block kernel everywhere sampled") {
  CounterRng rng(17, 0);
  const double lams[] = {0.3, 1.0, 2.5};
  const double qs[] = {-10.0, -1.0, -0.1, 0.1, 1.0, 10.0};
  for (double lam : lams)
    for (double q : qs)
      for (int it = 0; it < 2000; ++it) {
        double t = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        Eigen::Vector2d x(rng.normal(), rng.normal());
        Eigen::Vector2d u(rng.normal(), rng.normal());
        CHECK(block2d_bound_log_margin(lam, q, t, x, u) >= 0.0);
      }
}

TEST_CASE("strict bound gap when q = 0 and x != e^{-lambda t} u") {
  Eigen::Vector2d x(1.0, 0.5), u(0.2, 0.2);
  CHECK(block2d_bound_log_margin(1.0, 0.0, 0.7, x, u) > 0.0);
}

TEST_CASE("kappa kernel properties") {
  SpectralParams params({1.0, 2.0});
  Eigen::VectorXd x(2), u(2);
  x << 0.5, -0.3;
  u << 1.0, 0.7;
  // kappa = 1 reproduces the plain kernel
  CHECK(log_kernel_kappa({params, 1.0}, 0.8, x, u) ==
        doctest::Approx(log_kernel_diag(params, 0.8, x, u)).epsilon(1e-15));
  // strictly decreasing in kappa when x != e^{-lambda t} u somewhere
  double half = log_kernel_kappa({params, 0.5}, 0.8, x, u);
  double one = log_kernel_kappa({params, 1.0}, 0.8, x, u);
  double two = log_kernel_kappa({params, 2.0}, 0.8, x, u);
  CHECK(half > one);
  CHECK(one > two);
}

TEST_CASE("kappa=1/2 on an equal-rate pair equals the block bound") {
  SpectralParams pair({1.4, 1.4});
  CounterRng rng(23, 0);
  for (int i = 0; i < 500; ++i) {
    double t = std::exp(rng.uniform(std::log(1e-2), std::log(5.0)));
    Eigen::Vector2d x(rng.normal(), rng.normal());
    Eigen::Vector2d u(rng.normal(), rng.normal());
    CHECK(log_kernel_kappa({pair, 0.5}, t, x, u) ==
          doctest::Approx(log_bound_block2d(1.4, t, x, u)).epsilon(1e-12));
  }
}

TEST_CASE("general kernel: tensor structure and kappa=1/2 domination") {
  CanonicalForm form;
  form.blocks = {{1.5, 2.0}};
  form.scalars = {0.8};
  SpectralParams expanded = form.expanded_rates();
  CHECK(expanded.dim() == 3);
  CHECK(expanded.lambda(0) == 1.5);
  CHECK(expanded.lambda(1) == 1.5);
  CHECK(expanded.lambda(2) == 0.8);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  double d_block = -std::expm1(-2.0 * 1.5 * 0.4);
  double d_scalar = -std::expm1(-2.0 * 0.8 * 0.4);
  CHECK(kernel_general(form, 0.4, zero, zero) ==
        doctest::Approx(1.0 / d_block / std::sqrt(d_scalar)).epsilon(1e-13));

  // no blocks -> the diagonal kernel
  CanonicalForm diag_form;
  diag_form.scalars = {1.0, 2.0};
  SpectralParams params({1.0, 2.0});
  Eigen::VectorXd x(2), u(2);
  x << 0.4, -0.9;
  u << 0.1, 0.3;
  CHECK(log_kernel_general(diag_form, 0.7, x, u) ==
        doctest::Approx(log_kernel_diag(params, 0.7, x, u)).epsilon(1e-14));

  // kappa = 1/2 with the expanded rates dominates at random samples
  CounterRng rng(31, 0);
  KernelSpec bound{expanded, 0.5};
  for (int i = 0; i < 20000; ++i) {
    double t = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    Eigen::VectorXd xs(3), us(3);
    for (int j = 0; j < 3; ++j) {
      xs(j) = rng.normal();
      us(j) = rng.normal();
    }
    CHECK(log_kernel_general(form, t, xs, us) <= log_kernel_kappa(bound, t, xs, us) + 1e-12);
  }
}
