#pragma once

#include <string>
#include <vector>

#include "gm/market.hpp"
#include "gm/monte_carlo.hpp"
#include "json.hpp"

namespace gm {

// ---------------------------------------------------------------------------
// Single-step entropic inequality
//
//   theta(1-theta)(2q-1)(1-q) / (z(1-z))  <=  (h(z) - h(q)) / (q log(q/(1-q)))
//
// with z = q theta + (1-q)(1-theta). Both sides vanish as q -> 1/2.
// ---------------------------------------------------------------------------

struct ScanGrid {
  long q_points = 512;
  long theta_points = 512;
  double margin = 1e-9;     // distance kept from q in {1/2, 1} and theta in {0, 1}
  double tolerance = 1e-12;  // lhs > rhs + tolerance counts as a violation

  void validate() const;
};

struct InequalitySides {
  double lhs;
  double rhs;
  [[nodiscard]] double slack() const { return rhs - lhs; }
  /// Slack as a fraction of the right-hand side, which is positive off the edges.
  [[nodiscard]] double relative_slack() const { return (rhs - lhs) / rhs; }
};

/// Both sides at one (q, theta) with q in (1/2, 1) and theta in [0, 1].
InequalitySides entropic_inequality_sides(double q, double theta);

struct ScanReport {
  ScanGrid grid;
  long evaluated = 0;
  long violations = 0;
  double min_slack = 0.0;             // smallest rhs - lhs
  double worst_relative_slack = 0.0;  // smallest (rhs - lhs) / rhs, located below
  double worst_q = 0.0;
  double worst_theta = 0.0;
  long worst_q_index = 0;
  long worst_theta_index = 0;

  [[nodiscard]] bool passed() const { return violations == 0; }
};

/// Uniform grid over [1/2 + margin, 1 - margin] x [margin, 1 - margin];
/// rows run in parallel and are reduced in row order.
ScanReport scan_entropic_inequality(const ScanGrid& grid);

namespace serial {
ScanReport scan_entropic_inequality(const ScanGrid& grid);
}  // namespace serial

/// T I(Y; X | belief) - E[mu | belief]. Requires nu in (0, 1).
double check_single_step_bound(Belief belief, const ModelParams& params);

// ---------------------------------------------------------------------------
// Finite-horizon and asymptotic bounds
// ---------------------------------------------------------------------------

struct TheoremRow {
  long step;
  double expected_gain;    // sum_{i<=n} E[mu_i]
  double mutual_info;      // chain-rule I(Y; X_{1:n})
  double info_increment;   // I(Y; X_n | X_{1:n-1})
  double bound;            // T * mutual_info
  double slack;            // bound - expected_gain
};

struct TheoremReport {
  double nu;
  double theta0;
  double temperature;
  double tolerance;
  std::vector<TheoremRow> rows;  // n = 1..horizon
  double min_slack;
  long min_slack_step;

  [[nodiscard]] bool passed() const { return min_slack >= -tolerance; }
};

/// E[G_n] <= T I(Y; X_{1:n}) for every n <= horizon, from exact series.
/// Requires nu in (0, 1).
TheoremReport check_theorem_bound(long horizon, const ModelParams& params,
                                  double tolerance = 1e-10);

struct CorollaryReport {
  double nu;
  double theta0;
  long horizon;
  double expected_gain;     // E[G_N]
  double bound;             // T h(theta0)
  double gap;               // bound - expected_gain
  double residual_entropy;  // H(Y | X_{1:N})
  bool entropy_converged;   // residual < 1e-3 h(theta0)
  std::string warning;

  [[nodiscard]] bool passed() const { return expected_gain <= bound; }
};

/// Smallest N with H(Y | X_{1:N}) < fraction * h(theta0), searched up to
/// max_horizon (returns max_horizon if never reached).
long horizon_for_entropy_fraction(const ModelParams& params, double fraction,
                                  long max_horizon = 1L << 20);

CorollaryReport check_corollary(const ModelParams& params, long horizon);

// ---------------------------------------------------------------------------
// Scaling experiments
// ---------------------------------------------------------------------------

struct LogLogFit {
  double slope = 0.0;
  double slope_standard_error = 0.0;
  double intercept = 0.0;
};

/// Least squares of log y on log x.
LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

struct PeakSample {
  double nu;
  long peak_step;
  double peak_variance;
  long horizon;
};

struct ScalingFit {
  std::vector<PeakSample> samples;
  LogLogFit fit;
};

/// Default scan horizon for the variance peak at nu: max(50, ceil(10 / nu^2)).
long default_peak_horizon(double nu);

/// Step maximizing V[theta_n | Y = 1] over n in [1, horizon]. Throws
/// std::runtime_error if the maximum sits on the last scanned step.
PeakSample locate_variance_peak(const ModelParams& params, long horizon);

/// Peak step against nu on a log-log scale. Needs at least three values of nu.
ScalingFit variance_peak_scaling(const std::vector<double>& nus, double theta0,
                                 long horizon_override = 0);

struct OptimalFrequencySample {
  long tau;
  double nu_star;
  double gain_star;
  bool at_boundary;
};

struct OptimalFrequencyReport {
  std::vector<double> nu_grid;
  std::vector<OptimalFrequencySample> samples;
  LogLogFit fit;  // log nu* against log tau; zero when fewer than two taus
};

/// Log-spaced grid of `points` values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, long points);

/// For each horizon tau, the grid value of nu maximizing E[G_tau].
/// The grid must span at least a decade.
OptimalFrequencyReport optimal_frequency_experiment(const std::vector<long>& taus,
                                                    const std::vector<double>& nu_grid,
                                                    double theta0);

// ---------------------------------------------------------------------------
// Payoff autocorrelation
// ---------------------------------------------------------------------------

struct AutocorrelationReport {
  long step;
  long lag;
  double exact_joint;            // E[mu_n mu_{n-lag}]
  double spread_product_joint;   // product of conditional expectations
  double mc_joint;
  double mc_joint_standard_error;
  double joint_z;                // (mc - exact) / se
  double exact_autocovariance;
  double excess;                 // V[G_n] - sum V[mu_i] at `step`
  double excess_standard_error;
  double excess_sigma;
};

AutocorrelationReport check_autocorrelation(const SimConfig& config, long step, long lag);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ScanGrid& g);
void to_json(nlohmann::json& j, const ScanReport& r);
void to_json(nlohmann::json& j, const TheoremReport& r);
void to_json(nlohmann::json& j, const CorollaryReport& r);
void to_json(nlohmann::json& j, const LogLogFit& f);
void to_json(nlohmann::json& j, const ScalingFit& f);
void to_json(nlohmann::json& j, const OptimalFrequencyReport& r);
void to_json(nlohmann::json& j, const AutocorrelationReport& r);

}  // namespace gm
