#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gm/numerics.hpp"
#include "gm/rng.hpp"

using namespace gm;

TEST_SUITE("numerics") {

TEST_CASE("compensated sum recovers small terms lost by naive summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) {
    s.add(1e-16);
  }
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-12));
}

TEST_CASE("running moments match two-pass formulas and merge exactly") {
  StreamRng rng(3, 0);
  std::vector<double> xs(1000);
  for (double& x : xs) {
    x = rng.uniform() * 10.0 - 3.0;
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000.0;
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  RunningMoments all;
  RunningMoments a;
  RunningMoments b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.push(xs[i]);
    (i < 377 ? a : b).push(xs[i]);
  }
  a.merge(b);
  CHECK(all.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(all.variance() == doctest::Approx(ss / 999.0).epsilon(1e-12));
  CHECK(a.count == 1000);
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(all.standard_error() == doctest::Approx(std::sqrt(ss / 999.0 / 1000.0)).epsilon(1e-12));

  RunningMoments empty;
  a.merge(empty);
  CHECK(a.count == 1000);
  CHECK(empty.variance() == 0.0);
  CHECK(empty.standard_error() == 0.0);
}

TEST_CASE("logistic helpers are stable in both tails") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == 0.0);
  CHECK(logistic(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-50.0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-12));
  CHECK(log_logistic(-800.0) == -800.0);
  CHECK(std::isfinite(log_logistic(-1e6)));
  for (double x : {-30.0, -2.5, 0.0, 1.0, 17.0}) {
    CHECK(log_logistic(x) == doctest::Approx(std::log(logistic(x))).epsilon(1e-13));
    CHECK(logistic(x) + logistic(-x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("log factorial and binomial pmf") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-14));
  const long big = (1L << 17) + 5;
  CHECK(log_factorial(big) == doctest::Approx(std::lgamma(static_cast<double>(big) + 1.0)));
  CHECK_THROWS_AS(log_factorial(-1), std::domain_error);

  CHECK(log_binomial_coefficient(10, 3) == doctest::Approx(std::log(120.0)).epsilon(1e-14));
  CHECK(std::exp(log_binomial_pmf(4, 2, 0.5)) == doctest::Approx(6.0 / 16.0).epsilon(1e-14));
  CHECK(log_binomial_pmf(4, 5, 0.5) == -std::numeric_limits<double>::infinity());
  CHECK(log_binomial_pmf(3, 0, 0.0) == 0.0);
  CHECK(log_binomial_pmf(3, 3, 1.0) == 0.0);
  CHECK(log_binomial_pmf(3, 1, 1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("binomial law orders mass from the mode outward") {
  const BinomialLaw law(200, 0.6);
  double total = 0.0;
  for (double w : law.weights()) {
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(law.expect([](long) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
  const BinomialLaw wide(4096, 0.6);
  CHECK(wide.expect([](long) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(law.expect([](long k) { return static_cast<double>(k); }) ==
        doctest::Approx(120.0).epsilon(1e-13));
  const auto order = law.order();
  CHECK(order.front() == 120);
  for (std::size_t i = 1; i < order.size(); ++i) {
    CHECK(law.weight(order[i]) <= law.weight(order[i - 1]));
  }

  const BinomialLaw point(5, 1.0);
  CHECK(point.order().size() == 1);
  CHECK(point.order()[0] == 5);
  CHECK_THROWS_AS(BinomialLaw(-1, 0.5), std::domain_error);
  CHECK_THROWS_AS(BinomialLaw(3, 1.5), std::domain_error);
}

TEST_CASE("stream generator is keyed by seed and stream") {
  StreamRng a(1, 2);
  StreamRng b(1, 2);
  StreamRng c(1, 3);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

}  // TEST_SUITE
