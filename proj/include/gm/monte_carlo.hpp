#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gm/market.hpp"
#include "gm/numerics.hpp"
#include "gm/rng.hpp"

namespace gm {

/// How each trial draws the asset value: fixed, or from the Bernoulli(theta0) prior.
struct YMode {
  std::optional<AssetValue> fixed;

  static YMode prior() { return {}; }
  static YMode fixed_value(AssetValue y) { return {y}; }
};

struct SimConfig {
  ModelParams params{0.5, 0.2};
  long horizon = 500;
  long trials = 1000;
  std::uint64_t seed = 0;
  YMode y_mode = YMode::prior();
  std::size_t histogram_bins = 50;
  /// Upper bound on memory for raw trajectory export.
  std::size_t memory_budget_bytes = std::size_t{1} << 30;

  void validate() const;
};

/// Everything that happens at one step of one trial.
struct StepRecord {
  long step;
  AssetValue y;
  bool informed;
  Order order;
  double belief_before;
  double belief;        // after the order
  double payoff;        // informed trader
  double noise_payoff;  // noise trader
  double maker_payoff;  // market maker
  double gain;          // cumulative informed payoff through this step
};

struct Trajectory {
  AssetValue y = AssetValue::high;
  std::vector<Order> orders;
  std::vector<bool> informed;
  std::vector<double> beliefs;  // beliefs[i] is the belief after order i + 1
  std::vector<double> payoffs;
  std::vector<double> gains;
  std::vector<double> noise_gains;
  std::vector<double> maker_gains;
};

/// Runs one trial, calling visit(const StepRecord&) after every order.
/// Returns the drawn asset value.
template <class Visitor>
AssetValue run_trial(const SimConfig& config, std::uint64_t trial, Visitor&& visit) {
  StreamRng rng(config.seed, trial);
  const ModelParams& params = config.params;
  const AssetValue y = config.y_mode.fixed
                           ? *config.y_mode.fixed
                           : (rng.bernoulli(params.theta0()) ? AssetValue::high : AssetValue::low);
  Belief belief(params.theta0());
  double gain = 0.0;
  for (long step = 1; step <= config.horizon; ++step) {
    const bool informed = rng.bernoulli(params.nu());
    const double noise_draw = rng.uniform();
    Order order;
    if (informed) {
      order = y == AssetValue::high ? Order::buy : Order::sell;
    } else {
      order = noise_draw < 0.5 ? Order::buy : Order::sell;
    }
    const Quote qt = quote(belief, params);
    const double traded = trader_payoff(qt, order, y);
    StepRecord rec{};
    rec.step = step;
    rec.y = y;
    rec.informed = informed;
    rec.order = order;
    rec.belief_before = belief.theta();
    rec.payoff = informed ? traded : 0.0;
    rec.noise_payoff = informed ? 0.0 : traded;
    rec.maker_payoff = -traded;
    belief = posterior_update(belief, order, params);
    rec.belief = belief.theta();
    gain += rec.payoff;
    rec.gain = gain;
    visit(static_cast<const StepRecord&>(rec));
  }
  return y;
}

Trajectory simulate_trajectory(const SimConfig& config, std::uint64_t trial);

struct Moments {
  double mean;
  double variance;
  double standard_error;
};

struct StepSummary {
  long step;
  Moments belief;
  Moments payoff;
  Moments gain;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
};

struct EnsembleStats {
  long trials = 0;
  std::vector<StepSummary> steps;  // steps[n - 1] summarizes step n
  std::vector<double> final_gains;  // indexed by trial
  std::vector<AssetValue> asset_values;  // indexed by trial
  Histogram final_gain_histogram;
};

/// Fixed-width histogram over [0, max(values)]; the top edge is inclusive.
Histogram make_histogram(const std::vector<double>& values, std::size_t bins);

/// Parallel ensemble simulation. Trials are grouped into fixed-size blocks
/// whose statistics are merged in block order, so the output is
/// bit-identical for any worker count.
EnsembleStats simulate(const SimConfig& config);

/// Every trial's full path. Throws std::length_error past the memory budget.
std::vector<Trajectory> simulate_trajectories(const SimConfig& config);

struct BoundRow {
  long step;
  double mean_gain;
  double gain_standard_error;
  double bound;  // T * I(Y; X_{1:n})
  double slack;  // bound - mean_gain
  double violation_fraction;  // trajectories with G_n > bound
};

/// Empirical mean gain against T * I(Y; X_{1:n}) at every step. Requires nu > 0.
std::vector<BoundRow> empirical_bound_check(const SimConfig& config);

struct VarianceDecompositionRow {
  long step;
  double gain_variance;        // V[G_n]
  double payoff_variance_sum;  // sum_{i <= n} V[mu_i]
  double excess;               // gain_variance - payoff_variance_sum
  double excess_standard_error;
};

/// V[G_n] against the sum of per-step payoff variances. The standard error of
/// the excess comes from a second pass that replays every trial's stream.
std::vector<VarianceDecompositionRow> gain_variance_decomposition(const SimConfig& config);

struct MomentEstimate {
  double mean;
  double standard_error;
};

/// Empirical E[mu_n mu_m].
MomentEstimate empirical_payoff_product(const SimConfig& config, long n, long m);

/// Empirical argmax over steps of the belief variance.
long empirical_variance_peak(const EnsembleStats& stats);

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats);
void write_histogram_csv(std::ostream& out, const Histogram& histogram);
void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories);

namespace serial {
/// Reference implementation: trials in index order into one accumulator.
EnsembleStats simulate(const SimConfig& config);
}  // namespace serial

}  // namespace gm
