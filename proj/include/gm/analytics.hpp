#pragma once

#include <optional>
#include <vector>

#include "gm/market.hpp"

// Closed-form statistics of the game obtained by averaging over the
// binomial law of the buy count. Step indices follow the trading
// convention: orders are numbered 1..n, and the payoff of step i is booked
// against quotes formed from the first i - 1 orders.

namespace gm {

struct StepMoments {
  long step;
  double mean;
  double variance;
};

/// E[theta_n | Y = y].
double expected_price(long n, AssetValue y, const ModelParams& params);

/// V[theta_n | Y = y], computed as a centered second pass (never negative).
double price_variance(long n, AssetValue y, const ModelParams& params);

StepMoments price_moments(long n, AssetValue y, const ModelParams& params);

/// Unconditional E[mu_i] for i >= 1, from the bid and ask iterates.
double expected_payoff_exact(long i, const ModelParams& params);

/// Unconditional E[mu_i] for i >= 1, from the spread as a function of the buy count.
double expected_payoff_via_spread(long i, const ModelParams& params);

/// Unconditional E[mu_i^2] for i >= 1.
double payoff_second_moment(long i, const ModelParams& params);

/// E[G_n] = sum_{i=1}^n E[mu_i].
double expected_gain(long n, const ModelParams& params);

/// E[G_n] for n = 0..horizon in O(horizon^{3/2}): the buy-count law is
/// carried forward one order at a time and trimmed where its mass is below 1e-40.
std::vector<double> expected_gain_prefix(long horizon, const ModelParams& params);

/// H(Y | X_{1:n}).
double conditional_entropy(long n, const ModelParams& params);

/// I(Y; X_{1:n}) = h(theta0) - H(Y | X_{1:n}).
double mutual_info_direct(long n, const ModelParams& params);

/// I(Y; X_{m+1} | X_{1:m}): information carried by the order at step m + 1,
/// averaged over the buy count of the first m orders.
double step_information(long m, const ModelParams& params);

/// sum_{i=1}^n I(Y; X_i | X_{1:i-1}).
double mutual_info_chain(long n, const ModelParams& params);

/// I(Y; X | belief) = h(z) - h(q) with z = q theta + (1 - q)(1 - theta).
double single_step_mutual_info(Belief belief, const ModelParams& params);

/// The same quantity as the unsimplified four-term sum over (x, y).
double single_step_mutual_info_expanded(Belief belief, const ModelParams& params);

/// E[mu_n mu_{n-lag}] for 1 <= lag < n.
///
/// Conditions on Y (prior mixture when `given` is empty). The informed trade
/// at the earlier step is itself an order aligned with Y, which enters the
/// buy count seen by the later quote.
double payoff_joint_moment(long n, long lag, const ModelParams& params,
                           std::optional<AssetValue> given = std::nullopt);

/// E[mu_n mu_{n-lag}] - E[mu_n] E[mu_{n-lag}] (prior mixture).
double payoff_autocovariance(long n, long lag, const ModelParams& params);

/// E[(1-q) s_n (1-q) s_{n-lag}]: the product of the two conditional expected
/// payoffs averaged over the joint buy-count law. This drops the correlation
/// between the earlier trader type and the earlier order, so it is not
/// E[mu_n mu_{n-lag}] (too high at early steps, too low later); kept for
/// comparison.
double payoff_spread_product_moment(long n, long lag, const ModelParams& params,
                                    std::optional<AssetValue> given = std::nullopt);

/// Per-step exact statistics for n = 0..horizon. Row 0 carries the prior.
struct ExactSeries {
  std::vector<long> step;
  std::vector<double> price_mean_high;
  std::vector<double> price_var_high;
  std::vector<double> price_mean_low;
  std::vector<double> price_var_low;
  std::vector<double> payoff_mean;
  std::vector<double> payoff_via_spread;
  std::vector<double> payoff_var;
  std::vector<double> gain_mean;
  std::vector<double> conditional_entropy;
  std::vector<double> mi_direct;
  std::vector<double> mi_chain;
  std::vector<double> bound;  // T * mi_direct; +inf entries when nu = 0 are reported as NaN

  [[nodiscard]] std::size_t size() const { return step.size(); }
};

/// OpenMP over steps; every step is computed by the same serial code, so the
/// result does not depend on the worker count.
ExactSeries exact_series(long horizon, const ModelParams& params);

namespace serial {
ExactSeries exact_series(long horizon, const ModelParams& params);
}  // namespace serial

}  // namespace gm
