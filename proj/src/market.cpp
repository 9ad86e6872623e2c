#include "gm/market.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gm {

namespace {

void require_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace

double temperature(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::domain_error("temperature: nu must lie in (0, 1), got " + std::to_string(nu));
  }
  const double q = 0.5 * (1.0 + nu);
  return 1.0 / (q * 2.0 * std::atanh(nu));
}

ModelParams::ModelParams(double theta0, double nu) : theta0_(theta0), nu_(nu) {
  require_probability(theta0, "theta0");
  require_probability(nu, "nu");
  q_ = 0.5 * (1.0 + nu);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (nu == 0.0) {
    log_odds_step_ = 0.0;
    temperature_ = kInf;
    tau_ = kInf;
  } else if (nu == 1.0) {
    log_odds_step_ = kInf;
    temperature_ = 0.0;
    tau_ = 0.0;
  } else {
    log_odds_step_ = 2.0 * std::atanh(nu);
    temperature_ = 1.0 / (q_ * log_odds_step_);
    tau_ = 1.0 / log_odds_step_;
  }
}

Belief::Belief(double theta) : theta_(theta) { require_probability(theta, "belief"); }

double likelihood(Order x, AssetValue y, const ModelParams& params) {
  const double base = 0.5 * (1.0 - params.nu());
  return to_int(x) == to_int(y) ? base + params.nu() : base;
}

Belief posterior_update(Belief belief, Order x, const ModelParams& params) {
  const double theta = belief.theta();
  if (theta == 0.0 || theta == 1.0) {
    return belief;
  }
  const double l1 = likelihood(x, AssetValue::high, params);
  const double l0 = likelihood(x, AssetValue::low, params);
  const double num = theta * l1;
  return Belief(num / (num + (1.0 - theta) * l0));
}

Quote quote(Belief belief, const ModelParams& params) {
  const double theta = belief.theta();
  const double nu = params.nu();
  const double up = 1.0 + nu;
  const double down = 1.0 - nu;
  const double ask_den = up * theta + down * (1.0 - theta);
  const double bid_den = down * theta + up * (1.0 - theta);
  Quote out{};
  out.ask = up * theta / ask_den;
  out.bid = down * theta / bid_den;
  out.spread = 4.0 * nu * theta * (1.0 - theta) / (ask_den * bid_den);
  return out;
}

double expected_step_payoff(Belief belief, const ModelParams& params) {
  return (1.0 - params.q()) * quote(belief, params).spread;
}

double expected_step_payoff_from_quotes(Belief belief, const ModelParams& params) {
  const Quote qt = quote(belief, params);
  const double theta = belief.theta();
  return params.nu() * (qt.bid * (1.0 - theta) + (1.0 - qt.ask) * theta);
}

double realized_step_payoff(Belief belief, AssetValue y, bool informed_trades,
                            const ModelParams& params) {
  if (!informed_trades) {
    return 0.0;
  }
  const Quote qt = quote(belief, params);
  return y == AssetValue::high ? 1.0 - qt.ask : qt.bid;
}

double trader_payoff(const Quote& q, Order x, AssetValue y) {
  const double value = y == AssetValue::high ? 1.0 : 0.0;
  return x == Order::buy ? value - q.ask : q.bid - value;
}

double expected_noise_payoff(Belief belief, const ModelParams& params) {
  return -0.5 * (1.0 - params.nu()) * quote(belief, params).spread;
}

double fee_adjusted_gain_factor(double m, const ModelParams& params) {
  if (!(m >= 0.0)) {
    throw std::domain_error("fee_adjusted_gain_factor: fee fraction must be >= 0");
  }
  const double q = params.q();
  if (m == 0.0) {
    return 1.0;
  }
  if (q == 1.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return 1.0 - m * (2.0 * q - 1.0) / (1.0 - q);
}

bool informed_profitable_with_fee(double m, const ModelParams& params) {
  return params.nu() * m < 0.5 * (1.0 - params.nu());
}

}  // namespace gm
