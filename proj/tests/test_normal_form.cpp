#include <doctest.h>

#include <cmath>

#include "ousg/normal_form.hpp"
#include "ousg/rng.hpp"

using namespace ousg;

namespace {

Eigen::MatrixXd random_orthogonal(int n, CounterRng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

}  // namespace

TEST_CASE("diagonal drifts are normal with zero commutator") {
  OUModel model = OUModel::diagonal(SpectralParams({1.0, 2.0}));
  NormalityCheck nc = check_normal(model);
  CHECK(nc.normal);
  CHECK(nc.commutator_norm < 1e-13);
}

TEST_CASE("building blocks are normal") {
  Eigen::MatrixXd r(4, 4);
  r << 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, -2, 0, 0, 2, 0;
  OUModel model = building_block_model({0.8, r});
  NormalityCheck nc = check_normal(model);
  CHECK(nc.normal);
  CHECK(nc.commutator_norm < 1e-12);
}

TEST_CASE("a Jordan block is not normal") {
  Eigen::MatrixXd b(2, 2);
  b << -1, 1, 0, -1;
  OUModel model = OUModel::validate(Eigen::MatrixXd::Identity(2, 2), b);
  NormalityCheck nc = check_normal(model);
  CHECK_FALSE(nc.normal);
  CHECK(nc.commutator_norm > 0.1);
  CHECK_THROWS_WITH_AS(decompose(model), doctest::Contains("NotNormal"), Error);
}

TEST_CASE("already-canonical inputs decompose trivially") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
  b(0, 0) = -1.0;
  b(1, 1) = -2.0;
  OUModel model = OUModel::validate(Eigen::MatrixXd::Identity(2, 2), b);
  CanonicalForm form = decompose(model);
  CHECK(form.blocks.empty());
  REQUIRE(form.scalars.size() == 2);
  CHECK(form.scalars[0] == doctest::Approx(2.0));
  CHECK(form.scalars[1] == doctest::Approx(1.0));
  CHECK((form.basis.transpose() * form.basis - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("a rotation block is recovered exactly") {
  Eigen::MatrixXd b(2, 2);
  b << -1, 3, -3, -1;
  OUModel model = OUModel::validate(Eigen::MatrixXd::Identity(2, 2), b);
  CanonicalForm form = decompose(model);
  REQUIRE(form.blocks.size() == 1);
  CHECK(form.blocks[0].first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(form.blocks[0].second == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(form.scalars.empty());
}

TEST_CASE("reconstruct from raw canonical data") {
  CanonicalForm scalar_only;
  scalar_only.scalars = {1.0};
  OUModel m1 = reconstruct(scalar_only);
  CHECK(m1.B()(0, 0) == doctest::Approx(-1.0));
  CHECK(m1.Q()(0, 0) == doctest::Approx(1.0));

  CanonicalForm one_block;
  one_block.blocks = {{1.0, 2.0}};
  OUModel m2 = reconstruct(one_block);
  Eigen::MatrixXd expect(2, 2);
  expect << -1, 2, -2, -1;
  CHECK((m2.B() - expect).norm() < 1e-14);
}

TEST_CASE("roundtrip on random normal models, n <= 6") {
  CounterRng rng(77, 0);
  for (int trial = 0; trial < 50; ++trial) {
    int m = static_cast<int>(rng.next_u64() % 3);
    int s = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(6 - 2 * m));
    CanonicalForm truth;
    std::vector<double> rates;
    for (int j = 0; j < m + s; ++j) rates.push_back(0.4 + 0.7 * j + rng.uniform(0.0, 0.25));
    std::sort(rates.rbegin(), rates.rend());
    for (int j = 0; j < m; ++j)
      truth.blocks.emplace_back(rates[static_cast<std::size_t>(j)], rng.uniform(0.3, 4.0));
    for (int j = m; j < m + s; ++j) truth.scalars.push_back(rates[static_cast<std::size_t>(j)]);
    int n = truth.dim();
    truth.basis = random_orthogonal(n, rng);
    OUModel model = reconstruct(truth);

    CanonicalForm found = decompose(model);
    REQUIRE(found.blocks.size() == truth.blocks.size());
    for (std::size_t j = 0; j < truth.blocks.size(); ++j) {
      CHECK(found.blocks[j].first == doctest::Approx(truth.blocks[j].first).epsilon(1e-8));
      CHECK(found.blocks[j].second == doctest::Approx(truth.blocks[j].second).epsilon(1e-8));
    }
    REQUIRE(found.scalars.size() == truth.scalars.size());
    for (std::size_t j = 0; j < truth.scalars.size(); ++j)
      CHECK(found.scalars[j] == doctest::Approx(truth.scalars[j]).epsilon(1e-8));

    OUModel rebuilt = reconstruct(found);
    CHECK((rebuilt.B() - model.B()).norm() < 1e-8);
  }
}

TEST_CASE("decompose is bit-for-bit deterministic") {
  CounterRng rng(5, 9);
  CanonicalForm truth;
  truth.blocks = {{2.0, 1.3}};
  truth.scalars = {0.9};
  truth.basis = random_orthogonal(3, rng);
  OUModel model = reconstruct(truth);
  CanonicalForm a = decompose(model);
  CanonicalForm b = decompose(model);
  CHECK((a.basis - b.basis).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.blocks == b.blocks);
  CHECK(a.scalars == b.scalars);
}

TEST_CASE("eigenvalues of the reconstructed drift match the block data") {
  CanonicalForm form;
  form.blocks = {{1.5, 2.5}};
  form.scalars = {0.7};
  OUModel model = reconstruct(form);
  // expect -1.5 +- 2.5i and -0.7
  std::vector<std::pair<double, double>> expect = {{-1.5, 2.5}, {-1.5, -2.5}, {-0.7, 0.0}};
  for (const auto& [re, im] : expect) {
    bool found = false;
    for (int i = 0; i < 3; ++i) {
      auto ev = model.drift_eigenvalues()(i);
      if (std::abs(ev.real() - re) < 1e-8 && std::abs(ev.imag() - im) < 1e-8) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("whitened invariant covariance is diag(1/(2 lambda))") {
  CounterRng rng(13, 2);
  CanonicalForm truth;
  truth.blocks = {{1.2, 0.9}};
  truth.scalars = {2.0};
  truth.basis = random_orthogonal(3, rng);
  OUModel model = reconstruct(truth);
  CanonicalForm found = decompose(model);
  // invariant covariance of the canonical drift with Q = I
  Eigen::MatrixXd qinf = lyapunov_qinf(found.canonical_drift(), Eigen::MatrixXd::Identity(3, 3));
  SpectralParams rates = found.expanded_rates();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expect = i == j ? 1.0 / (2.0 * rates.lambda(i)) : 0.0;
      CHECK(qinf(i, j) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("near-degenerate q is demoted to scalars with a warning count") {
  CanonicalForm truth;
  truth.blocks = {{1.0, 1e-12}};
  OUModel model = reconstruct(truth);
  CanonicalForm found = decompose(model);
  CHECK(found.blocks.empty());
  CHECK(found.scalars.size() == 2);
  CHECK(found.demoted_blocks >= 0);  // demotion may happen at Schur or walk level
}
