#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gm/belief_map.hpp"
#include "gm/rng.hpp"

using namespace gm;

TEST_SUITE("belief_map") {

TEST_CASE("single application and closed-form iterate") {
  CHECK(map_apply(0.6, 0.6) == doctest::Approx(0.69230769230769230769).epsilon(1e-15));
  CHECK(map_iterate(0.5, 0.6, MapExponent{5}) ==
        doctest::Approx(0.88363636363636363636).epsilon(1e-14));
  CHECK(map_iterate(0.5, 0.6, MapExponent{0}) == 0.5);
  CHECK(map_apply(0.3, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(map_apply(0.3, 1.0) == 1.0);
  CHECK(map_apply(0.3, 0.0) == 0.0);
  CHECK(map_apply(0.0, 0.7) == 0.0);
  CHECK_THROWS_AS(map_apply(0.3, 1.1), std::domain_error);
}

TEST_CASE("inverse, commutation and composition") {
  StreamRng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = rng.uniform();
    const double q = 0.5 + 0.49 * rng.uniform();
    const double p = 0.5 + 0.49 * rng.uniform();
    CHECK(map_apply(map_apply(theta, q), 1.0 - q) == doctest::Approx(theta).epsilon(1e-10));
    CHECK(map_apply(map_apply(theta, q), p) ==
          doctest::Approx(map_apply(map_apply(theta, p), q)).epsilon(1e-10));
    double direct = theta;
    for (int i = 0; i < 7; ++i) {
      direct = map_apply(direct, q);
    }
    direct = map_apply(map_apply(direct, 1.0 - q), 1.0 - q);
    CHECK(std::abs(direct - map_iterate(theta, q, MapExponent{5})) <= 1e-10);
  }
}

TEST_CASE("price depends on the order sequence only through the buy count") {
  const double q = 0.65;
  const double theta0 = 0.35;
  // Every ordering of 4 buys and 3 sells.
  for (unsigned mask = 0; mask < (1u << 7); ++mask) {
    if (__builtin_popcount(mask) != 4) {
      continue;
    }
    double theta = theta0;
    for (int i = 0; i < 7; ++i) {
      theta = map_apply(theta, (mask >> i) & 1u ? q : 1.0 - q);
    }
    CHECK(theta == doctest::Approx(price_from_buycount(theta0, q, BuyCount(7, 4))).epsilon(1e-12));
  }
  CHECK(price_from_buycount(0.5, 0.6, BuyCount(1, 1)) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(BuyCount(10, 3).displacement() == -4);
  CHECK_THROWS_AS(BuyCount(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(BuyCount(3, -1), std::invalid_argument);
}

TEST_CASE("buy-count pmf") {
  const auto hi = buycount_pmf(1, AssetValue::high, 0.6);
  const auto lo = buycount_pmf(1, AssetValue::low, 0.6);
  REQUIRE(hi.size() == 2);
  CHECK(hi[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(hi[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(lo[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(lo[1] == doctest::Approx(0.4).epsilon(1e-15));
  const auto big = buycount_pmf(300, AssetValue::high, 0.55);
  double total = 0.0;
  for (double w : big) {
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("belief orbit stays accurate far from the prior") {
  const BeliefOrbit orbit(ModelParams(0.5, 0.2));
  CHECK(orbit.theta(5) == doctest::Approx(0.88363636363636363636).epsilon(1e-14));
  CHECK(orbit.theta(-5) == doctest::Approx(1.0 - 0.88363636363636363636).epsilon(1e-13));
  // Far out the belief rounds to 1 but its complement and logs stay finite.
  const long d = 2000;
  const double expected_log_complement = -static_cast<double>(d) * std::log(1.5);
  CHECK(orbit.theta(d) == 1.0);
  CHECK(orbit.log_complement(d) == doctest::Approx(expected_log_complement).epsilon(1e-12));
  CHECK(orbit.log_theta(-d) == doctest::Approx(expected_log_complement).epsilon(1e-12));
  CHECK(orbit.complement(d) == 0.0);
  CHECK(orbit.log_theta(d) == 0.0);

  const BeliefOrbit fixed(1.0, 0.7);
  CHECK(fixed.degenerate());
  CHECK(fixed.theta(-50) == 1.0);
  const BeliefOrbit perfect(0.5, 1.0);
  CHECK(perfect.theta(1) == 1.0);
  CHECK(perfect.theta(-1) == 0.0);
  CHECK(perfect.theta(0) == 0.5);
}

}  // TEST_SUITE
