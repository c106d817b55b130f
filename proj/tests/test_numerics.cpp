#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "phishguard/errors.hpp"
#include "phishguard/num/rng.hpp"
#include "phishguard/num/special.hpp"

using namespace phishguard;

TEST_CASE("digamma matches known values") {
  constexpr double euler = 0.5772156649015329;
  CHECK(num::digamma(1.0) == doctest::Approx(-euler).epsilon(1e-12));
  CHECK(num::digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(num::digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-12));
  CHECK(num::digamma(6.0) == doctest::Approx(-euler + 1.0 + 0.5 + 1.0 / 3 + 0.25 + 0.2).epsilon(1e-12));
}

TEST_CASE("digamma agrees with lgamma derivative") {
  num::RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(0.01, 50.0);
    double h = 1e-6 * std::max(1.0, x);
    double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
    CHECK(num::digamma(x) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("digamma rejects non-positive input") {
  CHECK_THROWS_AS(num::digamma(0.0), Error);
  CHECK_THROWS_AS(num::digamma(-1.5), Error);
}

TEST_CASE("rng stream is deterministic per seed") {
  num::RngStream a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    double ua = a.uniform(), ub = b.uniform(), uc = c.uniform();
    all_equal = all_equal && ua == ub;
    any_diff = any_diff || ua != uc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) and uniform_index is in range") {
  num::RngStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.uniform_index(7) < 7);
  }
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("normal moments") {
  num::RngStream rng(123);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma moments for shapes above and below one") {
  num::RngStream rng(321);
  for (double shape : {0.4, 1.0, 2.5, 8.0}) {
    const int n = 120000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      double x = rng.gamma(shape);
      CHECK(x > 0.0);
      sum += x;
      sum2 += x * x;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.03));
    CHECK(var == doctest::Approx(shape).epsilon(0.06));
  }
}

TEST_CASE("fork gives independent reproducible streams") {
  num::RngStream root(9);
  num::RngStream f1 = root.fork(1);
  num::RngStream f1b = root.fork(1);
  num::RngStream f2 = root.fork(2);
  CHECK(f1.uniform() == f1b.uniform());
  CHECK(f1.uniform() != f2.uniform());
}

TEST_CASE("shuffle is a seeded permutation") {
  num::RngStream a(5), b(5);
  std::vector<int> va{1, 2, 3, 4, 5, 6, 7, 8}, vb = va, sorted = va;
  a.shuffle(va);
  b.shuffle(vb);
  CHECK(va == vb);
  std::sort(va.begin(), va.end());
  CHECK(va == sorted);
}
