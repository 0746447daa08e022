#include <doctest.h>

#include <cmath>

#include "ousg/geometry.hpp"
#include "ousg/rng.hpp"

using namespace ousg;

TEST_CASE("interval sequence: first centers and partition") {
  IntervalSequence seq = build_interval_sequence(-10.0, 10.0);
  CHECK(seq.center(0) == 0.0);
  CHECK(seq.left(0) == doctest::Approx(-1.0));
  CHECK(seq.right(0) == doctest::Approx(1.0));
  // s^(1) solves s - 1/(1+s) = 1, i.e. s = sqrt(2)
  CHECK(seq.center(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(seq.center(-1) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));

  // consecutive endpoints mesh exactly and the window is covered
  for (long nu = seq.nu_lo; nu < seq.nu_hi(); ++nu) {
    CHECK(std::abs(seq.right(nu) - seq.left(nu + 1)) <= 1e-12);
  }
  CHECK(seq.left(seq.nu_lo) <= -10.0);
  CHECK(seq.right(seq.nu_hi()) >= 10.0);
}

TEST_CASE("interval_center matches the sequence walk") {
  IntervalSequence seq = build_interval_sequence(-8.0, 8.0);
  for (long nu = seq.nu_lo; nu <= seq.nu_hi(); ++nu)
    CHECK(interval_center(nu) == doctest::Approx(seq.center(nu)).epsilon(1e-14));
}

TEST_CASE("3-dilates have bounded overlap") {
  IntervalSequence seq = build_interval_sequence(-10.0, 10.0);
  CounterRng rng(2, 0);
  int worst = 0;
  for (int i = 0; i < 20000; ++i) {
    double x = rng.uniform(-9.0, 9.0);
    int covering = 0;
    for (long nu = seq.nu_lo; nu <= seq.nu_hi(); ++nu) {
      double c = seq.center(nu);
      double hw = 3.0 * IntervalSequence::half_width(c);
      if (x > c - hw && x <= c + hw) ++covering;
    }
    worst = std::max(worst, covering);
    CHECK(covering >= 1);
  }
  // the recorded overlap constant: 5 near the origin where the interval
  // widths change fastest, 3 in the asymptotic regime
  CHECK(worst <= 5);
}

TEST_CASE("membership in M_k and the partition after grouping") {
  Eigen::VectorXd x(2), u(2);
  x << 0.0, 0.0;
  u << 0.0, 0.0;
  CHECK(membership_mk(x, u, 0));
  CHECK_FALSE(membership_mk(x, u, 1));

  // n = 1: x = 0, u = 2 is global
  Eigen::VectorXd x1(1), u1(1);
  x1 << 0.0;
  u1 << 2.0;
  CHECK(membership_mk(x1, u1, 1));
  CHECK_FALSE(membership_mk(x1, u1, 0));

  // exhaustive 2D grid: exactly one class after global-first grouping
  for (double a : {-2.0, -0.5, 0.0, 1.0, 3.0})
    for (double b : {-2.0, -0.5, 0.0, 1.0, 3.0})
      for (double c : {-1.9, 0.1, 2.2})
        for (double d : {-1.1, 0.4, 2.8}) {
          Eigen::VectorXd xx(2), uu(2);
          xx << a, b;
          uu << c, d;
          MkClass cls = classify_mk(xx, uu);
          Eigen::VectorXd xp(2), up(2);
          for (int j = 0; j < 2; ++j) {
            xp(j) = xx(cls.perm[static_cast<std::size_t>(j)]);
            up(j) = uu(cls.perm[static_cast<std::size_t>(j)]);
          }
          int members = 0;
          for (int k = 0; k <= 2; ++k)
            if (membership_mk(xp, up, k)) ++members;
          CHECK(members == 1);
          CHECK(membership_mk(xp, up, cls.k));
        }
}

TEST_CASE("interval implication holds for randomized triples") {
  // explicit instance from the construction
  ImplCheck direct = check_impl(0.0, 0.9, 0.9 + 1.0 / 1.9);
  CHECK(direct.premise);
  CHECK(direct.conclusion);

  // vacuous case
  ImplCheck vac = check_impl(0.0, 5.0, 100.0);
  CHECK_FALSE(vac.premise);

  CounterRng rng(8, 0);
  long premise_count = 0;
  for (long i = 0; i < 1000000; ++i) {
    double s = rng.uniform(-8.0, 8.0);
    double sp = s + rng.uniform(-1.2, 1.2);
    double ss = sp + rng.uniform(-1.2, 1.2);
    ImplCheck chk = check_impl(s, sp, ss);
    if (chk.premise) {
      ++premise_count;
      CHECK(chk.conclusion);
    }
  }
  CHECK(premise_count > 50000);  // the sampler hits the premise often
}

TEST_CASE("density comparability over dilated cells") {
  SpectralParams lam1({1.0});
  // at the origin D_0 = 0 and the ratio over the 3-dilate [-3,3] spans
  // [1, e^9]; the grid min sits just above 1
  auto [lo0, hi0] = density_comparability({0}, lam1);
  CHECK(lo0 >= 1.0);
  CHECK(lo0 < 1.1);
  CHECK(hi0 <= std::exp(9.0) * (1.0 + 1e-12));
  CHECK(hi0 > std::exp(8.0));

  // uniform bound over a range of cells: |ln ratio| <= 6|s|/(1+|s|) + 9/(1+|s|)^2
  // never exceeds [e^{-7}, e^{9}] at lambda = 1, independently of nu
  for (long nu = -20; nu <= 20; ++nu) {
    auto [lo, hi] = density_comparability({nu}, lam1);
    CHECK(lo > std::exp(-7.0));
    CHECK(hi < std::exp(9.0) * (1.0 + 1e-12));
    CHECK(lo <= 1.1);  // the cell center itself has ratio 1
    CHECK(hi >= 1.0);
  }
}

TEST_CASE("polar decomposition: identity, isotropic closed form, roundtrip") {
  SpectralParams rates({1.0, 2.0});
  Eigen::VectorXd xi(2);
  xi << 1.0, 0.5;
  double beta = quadratic_form(rates, xi);
  PolarPoint p = polar_decompose(rates, xi, beta);
  CHECK(std::abs(p.s) < 1e-12);
  CHECK((p.xi_tilde - xi).norm() < 1e-11);

  // isotropic: s = log(R(xi)/beta) / (2 lambda)
  SpectralParams iso({1.7, 1.7});
  Eigen::VectorXd xi2(2);
  xi2 << 2.0, -1.0;
  double b2 = 1.0;
  PolarPoint p2 = polar_decompose(iso, xi2, b2);
  double closed = std::log(quadratic_form(iso, xi2) / b2) / (2.0 * 1.7);
  CHECK(p2.s == doctest::Approx(closed).epsilon(1e-12));

  // anisotropic self-consistency
  SpectralParams aniso({1.0, 2.0});
  Eigen::VectorXd xi3(2);
  xi3 << 2.0, 1.0;
  PolarPoint p3 = polar_decompose(aniso, xi3, 1.0);
  CHECK(quadratic_form(aniso, p3.xi_tilde) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((polar_compose(aniso, p3) - xi3).norm() < 1e-10);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_WITH_AS(polar_decompose(rates, zero, 1.0), doctest::Contains("ZeroVector"), Error);
}

TEST_CASE("polar roundtrip property, anisotropic") {
  SpectralParams rates({1.0, 2.0, 3.0});
  CounterRng rng(12, 0);
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd xi(3);
    for (int j = 0; j < 3; ++j) xi(j) = rng.normal();
    if (xi.norm() < 1e-3) continue;
    PolarPoint p = polar_decompose(rates, xi, (i % 2) ? 4.0 : 9.0);
    CHECK((polar_compose(rates, p) - xi).norm() <= 1e-10);
  }
}

TEST_CASE("dilation level is strictly increasing in s") {
  SpectralParams rates({1.0, 2.0});
  CounterRng rng(14, 0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd xi(2);
    xi << rng.normal(), rng.normal();
    if (xi.norm() < 1e-2) continue;
    double s = rng.uniform(-2.0, 2.0);
    double h = 1e-6;
    double up = quadratic_form(rates, aniso_dilate(rates, s + h, xi));
    double dn = quadratic_form(rates, aniso_dilate(rates, s - h, xi));
    CHECK(up > dn);
  }
}

TEST_CASE("lebesgue jacobian: k = 1 factor and isotropic comparability") {
  SpectralParams one({1.4});
  Eigen::VectorXd xi(1);
  xi << 0.9;
  PolarPoint p = polar_decompose(one, xi, 0.5);
  CHECK(lebesgue_jacobian_factor(one, p) == doctest::Approx(std::abs(xi(0))).epsilon(1e-12));
  // k = 1 exact element: e^{lambda s} lambda |xi_tilde| = lambda |xi|
  CHECK(lebesgue_jacobian_exact(one, p) == doctest::Approx(1.4 * std::abs(xi(0))).epsilon(1e-12));

  // isotropic k = 2 with rate 2: exact/factor = lambda * e^{(sum - lambda) s},
  // independent of where the point sits on the ellipse
  SpectralParams iso({2.0, 2.0});
  CounterRng rng(6, 0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd v(2);
    v << rng.normal(), rng.normal();
    if (v.norm() < 1e-2) continue;
    PolarPoint q = polar_decompose(iso, v, 1.0);
    double ratio = lebesgue_jacobian_exact(iso, q) / lebesgue_jacobian_factor(iso, q);
    double expect = 2.0 * std::exp((iso.lambda_sum() - 2.0) * q.s);
    CHECK(ratio == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("comparability ratio stays in a bounded window over the annulus regime") {
  SpectralParams rates({1.0, 2.0, 3.0});
  CounterRng rng(44, 0);
  double lo = 1e300, hi = 0.0;
  for (double beta : {4.0, 9.0}) {
    for (int i = 0; i < 5000; ++i) {
      Eigen::VectorXd v(3);
      for (int j = 0; j < 3; ++j) v(j) = rng.normal();
      if (v.norm() < 1e-2) continue;
      PolarPoint p = polar_decompose(rates, v, beta);
      // restrict to the window the annulus reduction actually uses
      double s = rng.uniform(-std::log(2.0) / (2.0 * rates.lambda_max()),
                             std::log(2.0) / (2.0 * rates.lambda_min()));
      PolarPoint q{s, p.xi_tilde, beta};
      double ratio = lebesgue_jacobian_exact(rates, q) / lebesgue_jacobian_factor(rates, q);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  CHECK(lo > 1.0 / 10.0);
  CHECK(hi < 10.0 * 10.0);
}

TEST_CASE("transversality cosine: unit at s = 0, isotropic always 1, positive floor") {
  SpectralParams rates({1.0, 3.0});
  Eigen::VectorXd xi(2);
  double beta = 5.0;
  xi << std::sqrt(beta / 1.0) * std::cos(0.8), std::sqrt(beta / 3.0) * std::sin(0.8);
  CHECK(transversality_cos(rates, 0.0, xi) == doctest::Approx(1.0).epsilon(1e-13));

  SpectralParams iso({2.0, 2.0});
  Eigen::VectorXd xi_iso(2);
  xi_iso << 1.0, 0.7;
  for (double s : {0.2, 1.0, 2.7}) {
    CHECK(transversality_cos(iso, s, xi_iso) == doctest::Approx(1.0).epsilon(1e-13));
  }

  // positivity everywhere, the per-sample analytic floor
  // e^{-(lambda_max - lambda_min) s}, and a 0.3 floor in the bounded
  // s-window the annulus reduction actually uses
  CounterRng rng(3, 3);
  double min_cos_window = 1.0;
  double window = std::log(2.0) / (2.0 * rates.lambda_min());
  for (int i = 0; i < 1000; ++i) {
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    Eigen::VectorXd p(2);
    p << std::sqrt(beta / 1.0) * std::cos(theta), std::sqrt(beta / 3.0) * std::sin(theta);
    double s = rng.uniform(0.0, 3.0);
    double c = transversality_cos(rates, s, p);
    CHECK(c > 0.0);
    CHECK(c <= 1.0 + 1e-15);
    CHECK(c >= std::exp(-(rates.lambda_max() - rates.lambda_min()) * s) - 1e-12);
    min_cos_window = std::min(min_cos_window, transversality_cos(rates, std::min(s, window), p));
  }
  CHECK(min_cos_window > 0.3);
}

TEST_CASE("tube measure: isotropic circular-sector closed form") {
  SpectralParams iso({1.0, 1.0});
  double beta = 4.0;
  double a = 0.5;
  Eigen::VectorXd center(2);
  center << std::sqrt(beta), 0.0;
  TubeSpec spec{iso, beta, center, a};
  MeasureEstimate quad = tube_measure_quadrature(spec);
  // cap of chord radius a on the circle r = sqrt(beta): half-angle asin(a/(2r)) * 2
  double dtheta = 4.0 * std::asin(a / (2.0 * std::sqrt(beta)));
  double exact = 0.5 * dtheta * std::exp(-beta);
  CHECK(quad.value == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("tube measure: k = 1 erfc form and monotonicity in a") {
  SpectralParams one({2.0});
  double beta = 3.0;
  Eigen::VectorXd center(1);
  center << std::sqrt(beta / 2.0);
  double both_sides = 2.0 * std::sqrt(beta / 2.0) + 0.1;
  MeasureEstimate narrow = tube_measure_quadrature({one, beta, center, 0.3});
  MeasureEstimate wide = tube_measure_quadrature({one, beta, center, both_sides});
  double one_tail = 0.5 * std::sqrt(M_PI / 2.0) * std::erfc(std::sqrt(beta));
  CHECK(narrow.value == doctest::Approx(one_tail).epsilon(1e-12));
  CHECK(wide.value == doctest::Approx(2.0 * one_tail).epsilon(1e-12));
  CHECK(narrow.value < wide.value);
}

TEST_CASE("tube quadrature against Monte Carlo, k = 2 anisotropic") {
  SpectralParams rates({1.0, 2.0});
  double beta = 6.0;
  Eigen::VectorXd center(2);
  center << std::sqrt(beta / 1.0) * std::cos(0.7), std::sqrt(beta / 2.0) * std::sin(0.7);
  TubeSpec spec{rates, beta, center, 0.3};
  MeasureEstimate quad = tube_measure_quadrature(spec);
  MeasureEstimate mc = tube_measure_montecarlo(spec, 400000, 5);
  double combined = std::sqrt(quad.std_error * quad.std_error + mc.std_error * mc.std_error);
  CHECK(std::abs(quad.value - mc.value) <= 3.0 * std::max(combined, 1e-12));
}

TEST_CASE("tube measure vanishes with the cap radius") {
  SpectralParams rates({1.0, 2.0});
  double beta = 5.0;
  Eigen::VectorXd center(2);
  center << std::sqrt(beta), 0.0;
  double prev = 0.0;
  for (double a : {1.0, 0.5, 0.2, 0.05}) {
    double v = tube_measure_quadrature({rates, beta, center, a}).value;
    if (prev > 0.0) CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("verify_inequality: explicit-constant lemmas never go negative") {
  SpectralParams rates({0.5, 1.0, 2.5});
  MarginReport chain = verify_inequality("local-bound-chain", 200000, rates, 10);
  CHECK(chain.explicit_constant);
  CHECK(chain.min_margin >= 0.0);

  SpectralParams pair({1.0, 2.0});
  MarginReport area = verify_inequality("area-bound", 200000, pair, 11);
  CHECK(area.explicit_constant);
  CHECK(area.min_margin >= -1e-10);
}

TEST_CASE("verify_inequality: empirical lemmas are positive and stable") {
  SpectralParams rates({1.0, 2.0});
  for (const char* lemma : {"lemma-3.1", "lemma-4.1", "claim-4.3", "lemma-4.2a", "lemma-4.2b",
                            "stima-t"}) {
    MarginReport rep = verify_inequality(lemma, 100000, rates, 20);
    CHECK_FALSE(rep.explicit_constant);
    CHECK(rep.inf_ratio > 0.0);
    double drift = std::abs(rep.inf_ratio_half - rep.inf_ratio) / rep.inf_ratio_half;
    CHECK(drift <= 0.2);
  }
  CHECK_THROWS_WITH_AS(verify_inequality("no-such-lemma", 10, rates, 1),
                       doctest::Contains("UnknownLemma"), Error);
}

TEST_CASE("lemma-4.2a degenerate pair gives zero on both sides") {
  SpectralParams rates({1.0, 2.0});
  Eigen::VectorXd xi(2);
  xi << 1.0, 0.7;
  double beta = 1.5;
  PolarPoint p = polar_decompose(rates, xi, beta);
  // identical points: both the distance and the projected distance vanish
  CHECK((xi - xi).norm() == 0.0);
  CHECK((p.xi_tilde - p.xi_tilde).norm() == 0.0);
}
