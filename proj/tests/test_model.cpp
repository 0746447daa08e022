#include <doctest.h>

#include <cmath>
#include <limits>

#include "ousg/model.hpp"
#include "ousg/quadrature.hpp"

using namespace ousg;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("validate_model accepts the classical and rotating cases") {
  Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_NOTHROW(OUModel::validate(id2, -id2));

  Eigen::MatrixXd b(2, 2);
  b << -1, 2, -2, -1;  // eigenvalues -1 +- 2i
  OUModel model = OUModel::validate(id2, b);
  CHECK(model.drift_eigenvalues()(0).real() == doctest::Approx(-1.0));
  CHECK(std::abs(model.drift_eigenvalues()(0).imag()) == doctest::Approx(2.0));
}

TEST_CASE("validate_model rejects bad inputs with typed errors") {
  Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_WITH_AS(OUModel::validate(id1, zero), doctest::Contains("NotHurwitz"), Error);

  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_WITH_AS(OUModel::validate(asym, -Eigen::MatrixXd::Identity(2, 2)),
                       doctest::Contains("NotSymmetric"), Error);

  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_WITH_AS(OUModel::validate(neg, neg), doctest::Contains("NotPositiveDefinite"),
                       Error);
}

TEST_CASE("covariance closed form: lambda=1, t=ln 2 gives 3/8") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0}));
  GaussianMeasure qt = covariance_qt(model, std::log(2.0));
  CHECK(qt.covariance()(0, 0) == doctest::Approx(0.375).epsilon(1e-14));

  // cross-check against direct quadrature of exp(2 s B)
  double numeric = integrate_gl_adaptive([](double s) { return std::exp(-2.0 * s); }, 0.0,
                                         std::log(2.0), 1e-13);
  CHECK(qt.covariance()(0, 0) == doctest::Approx(numeric).epsilon(1e-12));
}

TEST_CASE("infinite horizon: diagonal and building-block covariances") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0, 2.0, 0.5}));
  GaussianMeasure qinf = covariance_qt(model, kInf);
  CHECK(qinf.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(qinf.covariance()(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(qinf.covariance()(2, 2) == doctest::Approx(1.0).epsilon(1e-12));

  double lambda = 1.7;
  Eigen::MatrixXd r(2, 2);
  r << 0, 1, -1, 0;
  Eigen::MatrixXd b = lambda * (r - Eigen::MatrixXd::Identity(2, 2));
  OUModel block = OUModel::validate(Eigen::MatrixXd::Identity(2, 2), b);
  Eigen::MatrixXd qi = covariance_qt(block, kInf).covariance();
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(2, 2) / (2.0 * lambda);
  CHECK((qi - expect).norm() < 1e-12);
  Eigen::MatrixXd residual = b * qi + qi * b.transpose() + Eigen::MatrixXd::Identity(2, 2);
  CHECK(residual.norm() < 1e-12);
}

TEST_CASE("quadrature route matches the closed form for non-diagonal drift") {
  Eigen::MatrixXd b(2, 2);
  b << -1, 2, -2, -1;
  OUModel model = OUModel::validate(Eigen::MatrixXd::Identity(2, 2), b);
  // b = (R - I) with rotation R: same Lyapunov solution as the scalar case
  Eigen::MatrixXd qt = covariance_qt(model, 0.8).covariance();
  double expect = -std::expm1(-2.0 * 0.8) / 2.0;
  CHECK(qt(0, 0) == doctest::Approx(expect).epsilon(1e-11));
  CHECK(qt(1, 1) == doctest::Approx(expect).epsilon(1e-11));
  CHECK(std::abs(qt(0, 1)) < 1e-11);
}

TEST_CASE("monotonicity of Q_t in the positive-semidefinite order") {
  Eigen::MatrixXd b(2, 2);
  b << -1, 1, 0, -2;
  Eigen::MatrixXd q(2, 2);
  q << 2, 0.5, 0.5, 1;
  OUModel model = OUModel::validate(q, b);
  CounterRng rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    double t1 = std::exp(rng.uniform(std::log(1e-2), std::log(5.0)));
    double t2 = t1 * rng.uniform(1.01, 3.0);
    Eigen::MatrixXd diff =
        covariance_qt(model, t2).covariance() - covariance_qt(model, t1).covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("covariance_qt rejects nonpositive t") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0}));
  CHECK_THROWS_AS(covariance_qt(model, 0.0), Error);
  CHECK_THROWS_AS(covariance_qt(model, -1.0), Error);
}

TEST_CASE("gaussian density values and symmetry") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0}));
  GaussianMeasure ginf = covariance_qt(model, kInf);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(ginf.density(zero) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-13));

  OUModel model2 = OUModel::diagonal(SpectralParams({1.0, 1.0}));
  GaussianMeasure g2 = covariance_qt(model2, kInf);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  CHECK(g2.density(x) == doctest::Approx(std::exp(-1.0) / M_PI).epsilon(1e-13));
  CHECK(g2.density(x) == doctest::Approx(g2.density(-x)).epsilon(1e-15));
}

TEST_CASE("density integrates to one by quadrature, n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> lams;
    for (int j = 0; j < n; ++j) lams.push_back(0.6 + 0.7 * j);
    OUModel model = OUModel::diagonal(SpectralParams(lams));
    GaussianMeasure ginf = covariance_qt(model, kInf);
    // substitute x_j = y_j / sqrt(lambda_j), leaving exp(-|y|^2) for GH
    double mass = integrate_gh_tensor(n, 48, [&](const Eigen::VectorXd& y) {
      Eigen::VectorXd x(n);
      double jac = 1.0;
      for (int j = 0; j < n; ++j) {
        x(j) = y(j) / std::sqrt(lams[static_cast<std::size_t>(j)]);
        jac /= std::sqrt(lams[static_cast<std::size_t>(j)]);
      }
      return ginf.density(x) * jac * std::exp(y.squaredNorm());
    });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("generator on polynomials") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0, 2.0}));
  Eigen::VectorXd x(2);
  x << 0.7, -0.4;

  // f(x) = x_1: Hessian vanishes, gradient is e_1
  double v = generator_apply(model, [](const Eigen::VectorXd& p) { return p(0); }, x);
  CHECK(v == doctest::Approx(-1.0 * x(0)).epsilon(1e-8));

  // f(x) = x_2^2 with Q = I: 1 - 2 lambda_2 x_2^2
  v = generator_apply(model, [](const Eigen::VectorXd& p) { return p(1) * p(1); }, x);
  CHECK(v == doctest::Approx(1.0 - 2.0 * 2.0 * x(1) * x(1)).epsilon(1e-6));

  // constants map to zero
  v = generator_apply(model, [](const Eigen::VectorXd&) { return 3.25; }, x);
  CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("generator matches analytic values on cubics within 1e-6") {
  Eigen::MatrixXd b(2, 2);
  b << -1, 0.5, -0.5, -2;
  Eigen::MatrixXd q(2, 2);
  q << 1.5, 0.2, 0.2, 0.8;
  OUModel model = OUModel::validate(q, b);
  Eigen::VectorXd x(2);
  x << 0.3, -1.1;
  // f = x1^3 + x1 x2: Hess = [[6 x1, 1], [1, 0]], grad = (3 x1^2 + x2, x1)
  auto f = [](const Eigen::VectorXd& p) { return p(0) * p(0) * p(0) + p(0) * p(1); };
  Eigen::MatrixXd hess(2, 2);
  hess << 6.0 * x(0), 1.0, 1.0, 0.0;
  Eigen::VectorXd grad(2);
  grad << 3.0 * x(0) * x(0) + x(1), x(0);
  double expect = 0.5 * (q * hess).trace() + (b * x).dot(grad);
  CHECK(generator_apply(model, f, x) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("lyapunov residual small for random validated models up to n = 6") {
  CounterRng rng(11, 0);
  for (int n = 2; n <= 6; ++n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::MatrixXd q = g * g.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = rng.normal();
    Eigen::MatrixXd b = h - (h.cwiseAbs().sum() + 1.0) * Eigen::MatrixXd::Identity(n, n);
    OUModel model = OUModel::validate(q, b);
    Eigen::MatrixXd qinf = lyapunov_qinf(model.B(), model.Q());
    double res = (model.B() * qinf + qinf * model.B().transpose() + model.Q()).norm();
    CHECK(res < 1e-10);
  }
}
