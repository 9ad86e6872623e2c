#include "gm/belief_map.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gm/entropy.hpp"
#include "gm/numerics.hpp"

namespace gm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double shift_for(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("belief map: q must lie in [0, 1], got " + std::to_string(q));
  }
  if (q == 1.0) {
    return kInf;
  }
  if (q == 0.0) {
    return -kInf;
  }
  return std::log(q) - std::log1p(-q);
}

}  // namespace

BuyCount::BuyCount(long n, long k) : n_(n), k_(k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("BuyCount: need 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
  }
}

double map_apply(double theta, double q) {
  UnitInterval{theta};
  UnitInterval{q};
  if (theta == 0.0 || theta == 1.0) {
    return theta;
  }
  const double num = q * theta;
  return num / (num + (1.0 - q) * (1.0 - theta));
}

double map_iterate(double theta, double q, MapExponent d) {
  return BeliefOrbit(theta, q).theta(d.value);
}

double price_from_buycount(double theta0, double q, BuyCount bc) {
  return map_iterate(theta0, q, MapExponent{bc.displacement()});
}

std::vector<double> buycount_pmf(long n, AssetValue y, double q) {
  UnitInterval{q};
  const double p = y == AssetValue::high ? q : 1.0 - q;
  const BinomialLaw law(n, p);
  return {law.weights().begin(), law.weights().end()};
}

BeliefOrbit::BeliefOrbit(double theta0, double q)
    : theta0_(UnitInterval(theta0).value()),
      start_log_odds_(0.0),
      step_(shift_for(q)),
      degenerate_(theta0 == 0.0 || theta0 == 1.0) {
  if (!degenerate_) {
    start_log_odds_ = logit(theta0);
  }
}

BeliefOrbit::BeliefOrbit(const ModelParams& params) : BeliefOrbit(params.theta0(), params.q()) {
  step_ = params.log_odds_step();
}

double BeliefOrbit::log_odds(long d) const {
  if (d == 0 || step_ == 0.0) {
    return start_log_odds_;
  }
  if (std::isinf(step_)) {
    return (d > 0) == (step_ > 0.0) ? kInf : -kInf;
  }
  return start_log_odds_ + static_cast<double>(d) * step_;
}

double BeliefOrbit::theta(long d) const {
  return degenerate_ ? theta0_ : logistic(log_odds(d));
}

double BeliefOrbit::complement(long d) const {
  return degenerate_ ? 1.0 - theta0_ : logistic(-log_odds(d));
}

double BeliefOrbit::log_theta(long d) const {
  if (degenerate_) {
    return theta0_ == 1.0 ? 0.0 : -kInf;
  }
  return log_logistic(log_odds(d));
}

double BeliefOrbit::log_complement(long d) const {
  if (degenerate_) {
    return theta0_ == 0.0 ? 0.0 : -kInf;
  }
  return log_logistic(-log_odds(d));
}

}  // namespace gm
