#include "gm/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gm/analytics.hpp"
#include "gm/entropy.hpp"
#include "gm/numerics.hpp"

namespace gm {

namespace {

void require_interior_nu(const ModelParams& params, const char* what) {
  if (!(params.nu() > 0.0 && params.nu() < 1.0)) {
    throw std::domain_error(std::string(what) + ": nu must lie in (0, 1)");
  }
}

double grid_point(double lo, double hi, long i, long points) {
  if (points == 1) {
    return lo;
  }
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

// Running extremes over part of the grid. Location is tracked by relative
// slack, since the absolute slack is dominated by rounding wherever both
// sides are small.
struct ScanAccumulator {
  long evaluated = 0;
  long violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double worst_relative_slack = std::numeric_limits<double>::infinity();
  long worst_q_index = 0;
  long worst_theta_index = 0;

  void add(const InequalitySides& s, double tolerance, long i, long j) {
    ++evaluated;
    if (s.lhs > s.rhs + tolerance) {
      ++violations;
    }
    min_slack = std::min(min_slack, s.slack());
    if (s.relative_slack() < worst_relative_slack) {
      worst_relative_slack = s.relative_slack();
      worst_q_index = i;
      worst_theta_index = j;
    }
  }

  void merge(const ScanAccumulator& o) {
    evaluated += o.evaluated;
    violations += o.violations;
    min_slack = std::min(min_slack, o.min_slack);
    if (o.worst_relative_slack < worst_relative_slack) {
      worst_relative_slack = o.worst_relative_slack;
      worst_q_index = o.worst_q_index;
      worst_theta_index = o.worst_theta_index;
    }
  }
};

double scan_q(const ScanGrid& grid, long i) {
  return grid_point(0.5 + grid.margin, 1.0 - grid.margin, i, grid.q_points);
}

double scan_theta(const ScanGrid& grid, long j) {
  return grid_point(grid.margin, 1.0 - grid.margin, j, grid.theta_points);
}

ScanReport make_report(const ScanGrid& grid, const ScanAccumulator& acc) {
  ScanReport report;
  report.grid = grid;
  report.evaluated = acc.evaluated;
  report.violations = acc.violations;
  report.min_slack = acc.min_slack;
  report.worst_relative_slack = acc.worst_relative_slack;
  report.worst_q_index = acc.worst_q_index;
  report.worst_theta_index = acc.worst_theta_index;
  report.worst_q = scan_q(grid, acc.worst_q_index);
  report.worst_theta = scan_theta(grid, acc.worst_theta_index);
  return report;
}

}  // namespace

void ScanGrid::validate() const {
  if (q_points < 1 || theta_points < 1) {
    throw std::invalid_argument("ScanGrid: resolution must be >= 1");
  }
  if (!(margin > 0.0 && margin < 0.25)) {
    throw std::invalid_argument("ScanGrid: margin must lie in (0, 1/4)");
  }
  if (!(tolerance >= 0.0)) {
    throw std::invalid_argument("ScanGrid: tolerance must be >= 0");
  }
}

InequalitySides entropic_inequality_sides(double q, double theta) {
  if (!(q > 0.5 && q < 1.0)) {
    throw std::domain_error("entropic_inequality_sides: q must lie in (1/2, 1)");
  }
  UnitInterval{theta};
  const double t = 2.0 * q - 1.0;  // exact for q in [1/2, 1]
  const double z = q * theta + (1.0 - q) * (1.0 - theta);
  const double one_minus_z = (1.0 - q) * theta + q * (1.0 - theta);
  const double lhs = theta * (1.0 - theta) * t * (1.0 - q) / (z * one_minus_z);
  const double rhs = entropy_gap(q, theta) / (q * 2.0 * std::atanh(t));
  return {lhs, rhs};
}

ScanReport scan_entropic_inequality(const ScanGrid& grid) {
  grid.validate();
  std::vector<ScanAccumulator> rows(static_cast<std::size_t>(grid.q_points));
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < grid.q_points; ++i) {
    const double q = scan_q(grid, i);
    ScanAccumulator& row = rows[static_cast<std::size_t>(i)];
    for (long j = 0; j < grid.theta_points; ++j) {
      row.add(entropic_inequality_sides(q, scan_theta(grid, j)), grid.tolerance, i, j);
    }
  }
  ScanAccumulator total;
  for (const ScanAccumulator& row : rows) {
    total.merge(row);
  }
  return make_report(grid, total);
}

namespace serial {

ScanReport scan_entropic_inequality(const ScanGrid& grid) {
  grid.validate();
  ScanAccumulator acc;
  for (long i = 0; i < grid.q_points; ++i) {
    const double q = scan_q(grid, i);
    for (long j = 0; j < grid.theta_points; ++j) {
      acc.add(entropic_inequality_sides(q, scan_theta(grid, j)), grid.tolerance, i, j);
    }
  }
  return make_report(grid, acc);
}

}  // namespace serial

double check_single_step_bound(Belief belief, const ModelParams& params) {
  require_interior_nu(params, "check_single_step_bound");
  return params.temperature() * single_step_mutual_info(belief, params) -
         expected_step_payoff(belief, params);
}

TheoremReport check_theorem_bound(long horizon, const ModelParams& params, double tolerance) {
  require_interior_nu(params, "check_theorem_bound");
  if (horizon < 1) {
    throw std::invalid_argument("check_theorem_bound: horizon must be >= 1");
  }
  const auto h = static_cast<std::size_t>(horizon);
  std::vector<double> payoff(h);
  std::vector<double> info(h);
#pragma omp parallel for schedule(dynamic, 4)
  for (long n = 1; n <= horizon; ++n) {
    payoff[static_cast<std::size_t>(n - 1)] = expected_payoff_exact(n, params);
    info[static_cast<std::size_t>(n - 1)] = step_information(n - 1, params);
  }

  TheoremReport report{params.nu(), params.theta0(), params.temperature(), tolerance, {},
                       std::numeric_limits<double>::infinity(), 0};
  report.rows.reserve(h);
  CompensatedSum gain;
  CompensatedSum mi;
  for (long n = 1; n <= horizon; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    gain.add(payoff[i]);
    mi.add(info[i]);
    TheoremRow row{n, gain.value(), mi.value(), info[i], params.temperature() * mi.value(), 0.0};
    row.slack = row.bound - row.expected_gain;
    if (row.slack < report.min_slack) {
      report.min_slack = row.slack;
      report.min_slack_step = n;
    }
    report.rows.push_back(row);
  }
  return report;
}

long horizon_for_entropy_fraction(const ModelParams& params, double fraction, long max_horizon) {
  const double target = fraction * binary_entropy(params.theta0());
  auto reached = [&](long n) { return conditional_entropy(n, params) < target; };
  if (target <= 0.0) {
    return 0;
  }
  long hi = 1;
  while (hi < max_horizon && !reached(hi)) {
    hi = std::min(max_horizon, hi * 2);
  }
  if (!reached(hi)) {
    return max_horizon;
  }
  long lo = hi / 2;  // lo fails (or is 0), hi succeeds
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CorollaryReport check_corollary(const ModelParams& params, long horizon) {
  require_interior_nu(params, "check_corollary");
  if (horizon < 0) {
    throw std::invalid_argument("check_corollary: horizon must be >= 0");
  }
  CorollaryReport r{};
  r.nu = params.nu();
  r.theta0 = params.theta0();
  r.horizon = horizon;
  const double h0 = binary_entropy(params.theta0());
  r.bound = params.temperature() * h0;

  r.expected_gain = expected_gain_prefix(horizon, params).back();
  r.gap = r.bound - r.expected_gain;
  r.residual_entropy = conditional_entropy(horizon, params);
  r.entropy_converged = h0 == 0.0 || r.residual_entropy < 1e-3 * h0;
  if (!r.entropy_converged) {
    r.warning = "H(Y|X_{1:N}) = " + std::to_string(r.residual_entropy) +
                " is not below 1e-3 h(theta0); the horizon is too short for an asymptotic gap";
  }
  return r;
}

LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_log_log: need at least two paired samples");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) {
      throw std::domain_error("fit_log_log: samples must be positive");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) {
    throw std::domain_error("fit_log_log: x values are all equal");
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
      ssr += r * r;
    }
    fit.slope_standard_error = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

long default_peak_horizon(double nu) {
  return std::max(50L, static_cast<long>(std::ceil(10.0 / (nu * nu))));
}

PeakSample locate_variance_peak(const ModelParams& params, long horizon) {
  require_interior_nu(params, "locate_variance_peak");
  if (horizon < 2) {
    throw std::invalid_argument("locate_variance_peak: horizon must be >= 2");
  }
  std::vector<double> var(static_cast<std::size_t>(horizon));
#pragma omp parallel for schedule(dynamic, 8)
  for (long n = 1; n <= horizon; ++n) {
    var[static_cast<std::size_t>(n - 1)] = price_variance(n, AssetValue::high, params);
  }
  const auto it = std::max_element(var.begin(), var.end());
  const long peak = static_cast<long>(it - var.begin()) + 1;
  if (peak == horizon) {
    throw std::runtime_error("locate_variance_peak: peak at the scan boundary for nu = " +
                             std::to_string(params.nu()) + "; increase the horizon");
  }
  return {params.nu(), peak, *it, horizon};
}

ScalingFit variance_peak_scaling(const std::vector<double>& nus, double theta0,
                                 long horizon_override) {
  if (nus.size() < 3) {
    throw std::invalid_argument("variance_peak_scaling: needs at least three values of nu");
  }
  ScalingFit out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double nu : nus) {
    const ModelParams params(theta0, nu);
    const long horizon = horizon_override > 0 ? horizon_override : default_peak_horizon(nu);
    out.samples.push_back(locate_variance_peak(params, horizon));
    xs.push_back(nu);
    ys.push_back(static_cast<double>(out.samples.back().peak_step));
  }
  out.fit = fit_log_log(xs, ys);
  return out;
}

std::vector<double> log_spaced(double lo, double hi, long points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) {
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and at least two points");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (long i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

OptimalFrequencyReport optimal_frequency_experiment(const std::vector<long>& taus,
                                                    const std::vector<double>& nu_grid,
                                                    double theta0) {
  if (taus.empty()) {
    throw std::invalid_argument("optimal_frequency_experiment: no horizons given");
  }
  if (nu_grid.size() < 2) {
    throw std::invalid_argument("optimal_frequency_experiment: grid needs at least two points");
  }
  const auto [lo_it, hi_it] = std::minmax_element(nu_grid.begin(), nu_grid.end());
  if (!(*lo_it > 0.0 && *hi_it < 1.0)) {
    throw std::invalid_argument("optimal_frequency_experiment: grid must lie in (0, 1)");
  }
  if (*hi_it < 10.0 * *lo_it) {
    throw std::invalid_argument("optimal_frequency_experiment: grid must span a decade");
  }
  for (long tau : taus) {
    if (tau < 1) {
      throw std::invalid_argument("optimal_frequency_experiment: horizons must be >= 1");
    }
  }
  const long max_tau = *std::max_element(taus.begin(), taus.end());

  // gains[g][t] = E[G_{taus[t]}] at nu_grid[g]
  std::vector<std::vector<double>> gains(nu_grid.size(), std::vector<double>(taus.size()));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t g = 0; g < nu_grid.size(); ++g) {
    const std::vector<double> prefix = expected_gain_prefix(max_tau, ModelParams(theta0, nu_grid[g]));
    for (std::size_t t = 0; t < taus.size(); ++t) {
      gains[g][t] = prefix[static_cast<std::size_t>(taus[t])];
    }
  }

  OptimalFrequencyReport report;
  report.nu_grid = nu_grid;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t t = 0; t < taus.size(); ++t) {
    std::size_t best = 0;
    for (std::size_t g = 1; g < nu_grid.size(); ++g) {
      if (gains[g][t] > gains[best][t]) {
        best = g;
      }
    }
    const double nu_star = nu_grid[best];
    report.samples.push_back(
        {taus[t], nu_star, gains[best][t], nu_star == *lo_it || nu_star == *hi_it});
    xs.push_back(static_cast<double>(taus[t]));
    ys.push_back(nu_star);
  }
  if (taus.size() >= 2) {
    report.fit = fit_log_log(xs, ys);
  }
  return report;
}

AutocorrelationReport check_autocorrelation(const SimConfig& config, long step, long lag) {
  if (step > config.horizon) {
    throw std::invalid_argument("check_autocorrelation: step exceeds the simulation horizon");
  }
  const ModelParams& params = config.params;
  AutocorrelationReport r{};
  r.step = step;
  r.lag = lag;
  r.exact_joint = payoff_joint_moment(step, lag, params);
  r.spread_product_joint = payoff_spread_product_moment(step, lag, params);
  r.exact_autocovariance = payoff_autocovariance(step, lag, params);
  const MomentEstimate mc = empirical_payoff_product(config, step, step - lag);
  r.mc_joint = mc.mean;
  r.mc_joint_standard_error = mc.standard_error;
  r.joint_z = mc.standard_error > 0.0 ? (mc.mean - r.exact_joint) / mc.standard_error : 0.0;

  SimConfig truncated = config;
  truncated.horizon = step;
  const auto rows = gain_variance_decomposition(truncated);
  const VarianceDecompositionRow& last = rows.back();
  r.excess = last.excess;
  r.excess_standard_error = last.excess_standard_error;
  r.excess_sigma = last.excess_standard_error > 0.0 ? last.excess / last.excess_standard_error
                                                    : 0.0;
  return r;
}

// JSON ----------------------------------------------------------------------

void to_json(nlohmann::json& j, const ScanGrid& g) {
  j = {{"q_points", g.q_points},
       {"theta_points", g.theta_points},
       {"margin", g.margin},
       {"tolerance", g.tolerance}};
}

void to_json(nlohmann::json& j, const ScanReport& r) {
  j = {{"grid", r.grid},
       {"evaluated", r.evaluated},
       {"violations", r.violations},
       {"min_slack", r.min_slack},
       {"worst_relative_slack", r.worst_relative_slack},
       {"worst_q", r.worst_q},
       {"worst_theta", r.worst_theta},
       {"worst_q_index", r.worst_q_index},
       {"worst_theta_index", r.worst_theta_index},
       {"passed", r.passed()}};
}

void to_json(nlohmann::json& j, const TheoremReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TheoremRow& row : r.rows) {
    rows.push_back({{"step", row.step},
                    {"expected_gain", row.expected_gain},
                    {"mutual_info", row.mutual_info},
                    {"info_increment", row.info_increment},
                    {"bound", row.bound},
                    {"slack", row.slack}});
  }
  j = {{"nu", r.nu},
       {"theta0", r.theta0},
       {"temperature", r.temperature},
       {"tolerance", r.tolerance},
       {"min_slack", r.min_slack},
       {"min_slack_step", r.min_slack_step},
       {"passed", r.passed()},
       {"rows", rows}};
}

void to_json(nlohmann::json& j, const CorollaryReport& r) {
  j = {{"nu", r.nu},
       {"theta0", r.theta0},
       {"horizon", r.horizon},
       {"expected_gain", r.expected_gain},
       {"bound", r.bound},
       {"gap", r.gap},
       {"relative_gap", r.bound > 0.0 ? r.gap / r.bound : 0.0},
       {"residual_entropy", r.residual_entropy},
       {"entropy_converged", r.entropy_converged},
       {"warning", r.warning},
       {"passed", r.passed()}};
}

void to_json(nlohmann::json& j, const LogLogFit& f) {
  j = {{"slope", f.slope},
       {"slope_standard_error", f.slope_standard_error},
       {"intercept", f.intercept}};
}

void to_json(nlohmann::json& j, const ScalingFit& f) {
  nlohmann::json samples = nlohmann::json::array();
  for (const PeakSample& s : f.samples) {
    samples.push_back({{"nu", s.nu},
                       {"peak_step", s.peak_step},
                       {"peak_variance", s.peak_variance},
                       {"horizon", s.horizon}});
  }
  j = {{"samples", samples}, {"fit", f.fit}};
}

void to_json(nlohmann::json& j, const OptimalFrequencyReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const OptimalFrequencySample& s : r.samples) {
    samples.push_back({{"tau", s.tau},
                       {"nu_star", s.nu_star},
                       {"gain_star", s.gain_star},
                       {"at_boundary", s.at_boundary}});
  }
  j = {{"nu_grid", r.nu_grid}, {"samples", samples}, {"fit", r.fit}};
}

void to_json(nlohmann::json& j, const AutocorrelationReport& r) {
  j = {{"step", r.step},
       {"lag", r.lag},
       {"exact_joint", r.exact_joint},
       {"spread_product_joint", r.spread_product_joint},
       {"mc_joint", r.mc_joint},
       {"mc_joint_standard_error", r.mc_joint_standard_error},
       {"joint_z", r.joint_z},
       {"exact_autocovariance", r.exact_autocovariance},
       {"excess", r.excess},
       {"excess_standard_error", r.excess_standard_error},
       {"excess_sigma", r.excess_sigma}};
}

}  // namespace gm
