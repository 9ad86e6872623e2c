#pragma once

#include <cstdint>

namespace gm {

enum class Order : std::uint8_t { sell = 0, buy = 1 };
enum class AssetValue : std::uint8_t { low = 0, high = 1 };

inline int to_int(Order x) { return static_cast<int>(x); }
inline int to_int(AssetValue y) { return static_cast<int>(y); }

/// Effective temperature ((1+nu)/2 * log((1+nu)/(1-nu)))^{-1} for nu in (0, 1).
/// Throws std::domain_error at the endpoints.
double temperature(double nu);

/// Model parameters: prior P(Y = 1) and informed-trader fraction nu.
///
/// q = (1 + nu) / 2 is the probability that the next order agrees with Y.
/// temperature() reports +inf at nu = 0 and 0 at nu = 1; tau() = q T is the
/// convergence timescale of the belief map (+inf and 0 at the same limits).
class ModelParams {
 public:
  ModelParams(double theta0, double nu);

  [[nodiscard]] double theta0() const { return theta0_; }
  [[nodiscard]] double nu() const { return nu_; }
  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] double temperature() const { return temperature_; }
  [[nodiscard]] double tau() const { return tau_; }

  /// log(q / (1 - q)) = 2 atanh(nu): the log-odds shift of one buy order.
  [[nodiscard]] double log_odds_step() const { return log_odds_step_; }

  [[nodiscard]] ModelParams with_theta0(double theta0) const { return {theta0, nu_}; }
  [[nodiscard]] ModelParams with_nu(double nu) const { return {theta0_, nu}; }

 private:
  double theta0_;
  double nu_;
  double q_;
  double temperature_;
  double tau_;
  double log_odds_step_;
};

/// Market maker's posterior P(Y = 1 | orders so far).
class Belief {
 public:
  explicit Belief(double theta);
  [[nodiscard]] double theta() const { return theta_; }

 private:
  double theta_;
};

struct Quote {
  double bid;
  double ask;
  double spread;
};

/// p(X = x | Y = y) = (1 - nu)/2 + nu [x == y].
double likelihood(Order x, AssetValue y, const ModelParams& params);

/// One Bayesian update of the belief after observing order x.
/// Beliefs 0 and 1 are absorbing.
Belief posterior_update(Belief belief, Order x, const ModelParams& params);

/// Break-even bid and ask for the next order given the current belief.
Quote quote(Belief belief, const ModelParams& params);

/// E[mu | history] = (1 - q) * spread.
double expected_step_payoff(Belief belief, const ModelParams& params);

/// The same expectation written as nu (b (1 - theta) + (1 - a) theta).
double expected_step_payoff_from_quotes(Belief belief, const ModelParams& params);

/// Informed trader's realized payoff against the pre-trade quote.
double realized_step_payoff(Belief belief, AssetValue y, bool informed_trades,
                            const ModelParams& params);

/// Payoff to whoever sent order x at quote `q` when the asset is worth y.
/// The market maker books the negation.
double trader_payoff(const Quote& q, Order x, AssetValue y);

/// Expected noise-trader payoff -(1 - nu)/2 * spread.
double expected_noise_payoff(Belief belief, const ModelParams& params);

/// Factor 1 - m (2q - 1)/(1 - q) by which a fee of m times the spread
/// reduces the informed trader's total gain.
double fee_adjusted_gain_factor(double m, const ModelParams& params);

/// nu m < (1 - nu)/2, equivalently nu < 1/(1 + 2m).
bool informed_profitable_with_fee(double m, const ModelParams& params);

}  // namespace gm
