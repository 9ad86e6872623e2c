// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gm/analytics.hpp"
#include "gm/belief_map.hpp"
#include "gm/cli.hpp"
#include "gm/entropy.hpp"
#include "gm/market.hpp"
#include "gm/monte_carlo.hpp"
#include "gm/verification.hpp"
#include "json.hpp"

using namespace gm;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, fixed here so every run checks the same thing.
constexpr long kScanPoints = 512;
constexpr double kScanMargin = 1e-9;
constexpr double kScanTolerance = 1e-12;
constexpr double kScanSeconds = 5.0;

constexpr long kTheoremHorizon = 500;
constexpr double kTheoremTolerance = 1e-10;
constexpr double kTheoremSeconds = 30.0;
const std::vector<double> kGridNu = {0.05, 0.1, 0.2, 0.5};
const std::vector<double> kGridTheta = {0.1, 0.5, 0.9};

constexpr long kRouteShort = 64;
constexpr double kRouteShortTolerance = 1e-10;
constexpr long kRouteLong = 4096;
constexpr double kRouteLongTolerance = 1e-8;

constexpr long kAgreementTrials = 1000;
constexpr long kAgreementHorizon = 500;
constexpr std::uint64_t kAgreementSeed = 7;
constexpr double kAgreementSigmas = 3.0;
constexpr double kAgreementFraction = 0.99;

constexpr double kEntropyFraction = 1e-3;

constexpr double kScalingLo = -2.3;
constexpr double kScalingHi = -1.7;
constexpr double kScalingSeconds = 60.0;

constexpr long kAutocorrTrials = 100000;
constexpr long kAutocorrStep = 200;
constexpr double kAutocorrSigmas = 5.0;
constexpr long kJointStep = 10;
constexpr long kJointLag = 1;
constexpr double kJointSigmas = 3.0;

constexpr long kViolationTrials = 10000;
constexpr long kViolationHorizon = 500;

constexpr double kOptimalLo = -0.65;
constexpr double kOptimalHi = -0.35;
const std::vector<long> kTaus = {100, 400, 1600};
constexpr long kOptimalGridPoints = 161;

constexpr double kIdentityTolerance = 1e-10;

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.passed) {
    ++failures;
  }
  std::printf("[%s] %2d %-34s %s (%.2f s)\n", out.passed ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), seconds);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// -- criteria ---------------------------------------------------------------

Outcome entropic_inequality() {
  const auto t = std::chrono::steady_clock::now();
  ScanGrid grid;
  grid.q_points = kScanPoints;
  grid.theta_points = kScanPoints;
  grid.margin = kScanMargin;
  grid.tolerance = kScanTolerance;
  const ScanReport r = scan_entropic_inequality(grid);
  const double seconds = elapsed_since(t);
  const bool on_edge = r.worst_q_index == 0;
  std::ostringstream d;
  d << "violations=" << r.violations << "/" << r.evaluated << " worst at q=" << r.worst_q
    << " theta=" << r.worst_theta << (on_edge ? " (q->1/2 edge)" : " (interior)")
    << fmt(" runtime=%.3fs", seconds);
  return {r.violations == 0 && on_edge && seconds < kScanSeconds, d.str()};
}

Outcome theorem_bound() {
  const auto t = std::chrono::steady_clock::now();
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (double nu : kGridNu) {
    for (double theta : kGridTheta) {
      const TheoremReport r =
          check_theorem_bound(kTheoremHorizon, ModelParams(theta, nu), kTheoremTolerance);
      if (r.min_slack < worst) {
        worst = r.min_slack;
        where = "nu=" + fmt("%g", nu) + " theta0=" + fmt("%g", theta) +
                " n=" + std::to_string(r.min_slack_step);
      }
    }
  }
  const double seconds = elapsed_since(t);
  return {worst >= -kTheoremTolerance && seconds < kTheoremSeconds,
          fmt("min slack=%.3e", worst) + " at " + where + fmt(" runtime=%.2fs", seconds)};
}

Outcome mi_routes() {
  double worst_short = 0.0;
  for (double nu : kGridNu) {
    for (double theta : kGridTheta) {
      const ModelParams p(theta, nu);
      double chain = 0.0;
      for (long n = 1; n <= kRouteShort; ++n) {
        chain += step_information(n - 1, p);
        worst_short = std::max(worst_short, std::abs(chain - mutual_info_direct(n, p)));
        worst_short = std::max(worst_short, std::abs(mutual_info_chain(n, p) - mutual_info_direct(n, p)));
      }
    }
  }
  double worst_long = 0.0;
  for (double theta : kGridTheta) {
    const ModelParams p(theta, 0.2);
    std::vector<double> info(kRouteLong);
    std::vector<double> direct(kRouteLong);
#pragma omp parallel for schedule(dynamic, 16)
    for (long m = 0; m < kRouteLong; ++m) {
      info[static_cast<std::size_t>(m)] = step_information(m, p);
      direct[static_cast<std::size_t>(m)] = mutual_info_direct(m + 1, p);
    }
    double chain = 0.0;
    for (long m = 0; m < kRouteLong; ++m) {
      chain += info[static_cast<std::size_t>(m)];
      worst_long = std::max(worst_long, std::abs(chain - direct[static_cast<std::size_t>(m)]));
    }
  }
  return {worst_short <= kRouteShortTolerance && worst_long <= kRouteLongTolerance,
          fmt("max|diff| n<=64: %.2e", worst_short) + fmt(", n<=4096 (nu=0.2): %.2e", worst_long)};
}

Outcome exact_vs_mc() {
  SimConfig c;
  c.params = ModelParams(0.5, 0.2);
  c.horizon = kAgreementHorizon;
  c.trials = kAgreementTrials;
  c.seed = kAgreementSeed;
  c.y_mode = YMode::fixed_value(AssetValue::high);
  const EnsembleStats s = simulate(c);
  const ExactSeries e = exact_series(kAgreementHorizon, c.params);
  // The standard error uses the exact variance: late in the path the variance
  // comes from rare slow-converging trajectories that 1000 samples mostly
  // miss, so the sample SE is far too small there.
  long within_exact_se = 0;
  long within_sample_se = 0;
  for (long n = 1; n <= kAgreementHorizon; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const Moments& m = s.steps[i - 1].belief;
    const double diff = std::abs(m.mean - e.price_mean_high[i]);
    const double exact_se = std::sqrt(e.price_var_high[i] / static_cast<double>(c.trials));
    within_exact_se += diff <= kAgreementSigmas * exact_se ? 1 : 0;
    within_sample_se += diff <= kAgreementSigmas * m.standard_error ? 1 : 0;
  }
  const double frac = static_cast<double>(within_exact_se) / kAgreementHorizon;
  const double frac_sample = static_cast<double>(within_sample_se) / kAgreementHorizon;
  return {frac >= kAgreementFraction,
          fmt("within 3 SE at %.1f%% of steps", 100.0 * frac) +
              fmt(" (sample-SE: %.1f%%)", 100.0 * frac_sample)};
}

Outcome corollary() {
  const ModelParams p(0.5, 0.2);
  const long n = horizon_for_entropy_fraction(p, kEntropyFraction);
  const CorollaryReport r = check_corollary(p, n);
  bool ok = r.entropy_converged && r.expected_gain < r.bound;
  std::ostringstream d;
  d << "N=" << n << fmt(" E[G]=%.6f", r.expected_gain) << fmt(" < T log2=%.6f", r.bound)
    << "; gap/bound over nu=0.2,0.1,0.05:";
  double previous = std::numeric_limits<double>::infinity();
  for (double nu : {0.2, 0.1, 0.05}) {
    const ModelParams q(0.5, nu);
    const CorollaryReport c = check_corollary(q, horizon_for_entropy_fraction(q, kEntropyFraction));
    const double rel = c.gap / c.bound;
    d << fmt(" %.3e", rel);
    ok = ok && c.entropy_converged && rel < previous;
    previous = rel;
  }
  return {ok, d.str()};
}

Outcome variance_scaling() {
  const auto t = std::chrono::steady_clock::now();
  const ScalingFit f = variance_peak_scaling({0.4, 0.2, 0.1}, 0.5);
  const double seconds = elapsed_since(t);
  std::ostringstream d;
  d << "peaks:";
  for (const PeakSample& s : f.samples) {
    d << " n*(" << s.nu << ")=" << s.peak_step;
  }
  d << fmt(" slope=%.3f", f.fit.slope) << fmt(" runtime=%.2fs", seconds);
  return {f.fit.slope >= kScalingLo && f.fit.slope <= kScalingHi && seconds < kScalingSeconds,
          d.str()};
}

Outcome autocorrelation() {
  SimConfig c;
  c.params = ModelParams(0.5, 0.2);
  c.horizon = kAutocorrStep;
  c.trials = kAutocorrTrials;
  c.seed = 2024;
  const AutocorrelationReport excess = check_autocorrelation(c, kAutocorrStep, kJointLag);
  const AutocorrelationReport joint = check_autocorrelation(c, kJointStep, kJointLag);
  // Autocovariance from the same ensemble: E[mu_n mu_m] - E[mu_n] E[mu_m].
  const ExactSeries e = exact_series(kJointStep, c.params);
  const double exact_cov = payoff_autocovariance(kJointStep, kJointLag, c.params);
  const double mc_cov_vs_exact_means =
      joint.mc_joint - e.payoff_mean[kJointStep] * e.payoff_mean[kJointStep - kJointLag];
  const double cov_z = (mc_cov_vs_exact_means - exact_cov) / joint.mc_joint_standard_error;
  const bool ok = excess.excess_sigma >= kAutocorrSigmas &&
                  std::abs(joint.joint_z) <= kJointSigmas && std::abs(cov_z) <= kJointSigmas;
  return {ok, fmt("excess at n=200: %.4f", excess.excess) +
                  fmt(" (%.1f sigma)", excess.excess_sigma) +
                  fmt("; E[mu10 mu9] exact=%.6e", joint.exact_joint) +
                  fmt(" MC=%.6e", joint.mc_joint) + fmt(" z=%.2f", joint.joint_z) +
                  fmt("; autocov exact=%.3e", exact_cov) + fmt(" z=%.2f", cov_z)};
}

Outcome trajectory_violations() {
  SimConfig c;
  c.params = ModelParams(0.5, 0.2);
  c.horizon = kViolationHorizon;
  c.trials = kViolationTrials;
  c.seed = 11;
  const EnsembleStats s = simulate(c);
  const double bound = c.params.temperature() * binary_entropy(0.5);
  const auto above = std::count_if(s.final_gains.begin(), s.final_gains.end(),
                                   [&](double g) { return g > bound; });
  const double frac = static_cast<double>(above) / static_cast<double>(c.trials);
  const auto max_it = std::max_element(s.final_gains.begin(), s.final_gains.end());
  return {above > 0, fmt("fraction with G_500 > T H(Y)=%.4f: ", bound) + fmt("%.4f", frac) +
                         fmt(", max G=%.3f", *max_it)};
}

Outcome optimal_frequency() {
  const OptimalFrequencyReport r =
      optimal_frequency_experiment(kTaus, log_spaced(0.005, 0.95, kOptimalGridPoints), 0.5);
  std::ostringstream d;
  bool interior = true;
  for (const auto& s : r.samples) {
    d << "nu*(" << s.tau << ")=" << fmt("%.4f ", s.nu_star);
    interior = interior && !s.at_boundary;
  }
  d << fmt("slope=%.3f", r.fit.slope);
  return {interior && r.fit.slope >= kOptimalLo && r.fit.slope <= kOptimalHi, d.str()};
}

Outcome identities() {
  double worst = 0.0;
  auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  constexpr int kSteps = 100;
  for (int i = 0; i <= kSteps; ++i) {
    const double q = static_cast<double>(i) / kSteps;
    for (int j = 0; j <= kSteps; ++j) {
      const double theta = static_cast<double>(j) / kSteps;
      const double z = q * theta + (1.0 - q) * (1.0 - theta);
      track(theta * (1.0 - theta) * (2.0 * q - 1.0) * (2.0 * q - 1.0),
            z * (1.0 - z) - q * (1.0 - q));
      // The map is invertible only for q strictly inside (0, 1).
      if (q > 0.0 && q < 1.0) {
        track(map_apply(map_apply(theta, q), 1.0 - q), theta);
        const double p = 0.5 + 0.5 * static_cast<double>(j) / kSteps;
        track(map_apply(map_apply(theta, q), p), map_apply(map_apply(theta, p), q));
        double iterated = theta;
        for (int d = 1; d <= 6; ++d) {
          iterated = map_apply(iterated, q);
          track(iterated, map_iterate(theta, q, MapExponent{d}));
        }
      }
      if (q >= 0.5 && q < 1.0) {
        const ModelParams params(0.5, 2.0 * q - 1.0);
        const Belief b(theta);
        track(expected_step_payoff(b, params), expected_step_payoff_from_quotes(b, params));
        track(single_step_mutual_info_expanded(b, params), single_step_mutual_info(b, params));
      }
    }
  }
  double worst_series = 0.0;
  for (double theta0 : {0.1, 0.5, 0.9}) {
    for (double nu : {0.05, 0.2, 0.5, 0.9}) {
      const ExactSeries e = exact_series(300, ModelParams(theta0, nu));
      for (std::size_t n = 1; n < e.size(); ++n) {
        worst_series = std::max(worst_series, std::abs(e.payoff_mean[n] - e.payoff_via_spread[n]));
      }
    }
  }
  return {worst <= kIdentityTolerance && worst_series <= kIdentityTolerance,
          fmt("max pointwise error=%.2e", worst) +
              fmt(", per-step payoff routes=%.2e", worst_series)};
}

Outcome determinism() {
  const fs::path root = fs::path(GM_TEST_TMPDIR) / "determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--nu", "0.2", "--theta", "0.5", "--steps", "200", "--trials", "3000",
       "--seed", "7", "--y", "1", "--export-trajectories"},
      {"simulate", "--nu", "0.35", "--steps", "80", "--trials", "500", "--format", "json"},
      {"exact", "--nu", "0.2", "--theta", "0.3", "--steps", "200"},
      {"verify", "inequality", "--grid", "128"},
      {"verify", "bound", "--steps", "150", "--trials", "2000", "--seed", "3"},
      {"verify", "optimal-nu", "--taus", "50,200", "--grid", "41"},
  };
  long compared = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path first = root / ("cmd" + std::to_string(c));
    auto args = commands[c];
    args.insert(args.end(), {"--threads", "1", "--out", first.string()});
    const int code = cli::run(args);
    if (code != cli::kPass) {
      return {false, "command " + std::to_string(c) + " exited " + std::to_string(code)};
    }
    const auto manifest = nlohmann::json::parse(slurp(first / "manifest.json"));
    for (int threads : {2, 4}) {
      const fs::path again = root / ("cmd" + std::to_string(c) + "_t" + std::to_string(threads));
      const int replay = cli::run({"replay", (first / "manifest.json").string(), "--threads",
                                   std::to_string(threads), "--out", again.string()});
      if (replay != code) {
        return {false, "replay of command " + std::to_string(c) + " exited " +
                           std::to_string(replay)};
      }
      for (const auto& name : manifest.at("outputs")) {
        const std::string file = name.get<std::string>();
        if (file == "manifest.json") {
          continue;
        }
        ++compared;
        if (slurp(first / file) != slurp(again / file)) {
          return {false, file + " differs on replay with " + std::to_string(threads) + " threads"};
        }
      }
    }
  }
  return {true, std::to_string(commands.size()) + " commands, " + std::to_string(compared) +
                    " output files byte-identical across 1/2/4 threads"};
}

}  // namespace

int main() {
  std::printf("acceptance suite (OpenMP max threads: %d)\n", omp_get_max_threads());
  report(1, "entropic inequality scan", entropic_inequality);
  report(2, "finite-horizon information bound", theorem_bound);
  report(3, "mutual information route equality", mi_routes);
  report(4, "exact vs Monte Carlo belief", exact_vs_mc);
  report(5, "asymptotic bound", corollary);
  report(6, "variance-peak scaling", variance_scaling);
  report(7, "positive payoff autocorrelation", autocorrelation);
  report(8, "trajectory-level bound violations", trajectory_violations);
  report(9, "optimal-frequency scaling", optimal_frequency);
  report(10, "identity suite", identities);
  report(11, "manifest replay determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
