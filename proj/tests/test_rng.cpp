#include <doctest.h>

#include <cmath>

#include "ousg/rng.hpp"

using ousg::CounterRng;

TEST_CASE("streams are reproducible and independent of interleaving") {
  CounterRng a(42, 0), b(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  CounterRng s0(42, 0), s1(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i)
    if (s0.next_u64() == s1.next_u64()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("uniform stays inside (0,1)") {
  CounterRng rng(7, 3);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments at desk scale") {
  CounterRng rng(123, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  double kurt = sum4 / n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}
