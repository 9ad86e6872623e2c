#include "gm/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gm/analytics.hpp"
#include "gm/io.hpp"

namespace gm {

namespace {

// Trials per block and blocks per wave. Both are fixed so that the merge
// tree never depends on the number of workers.
constexpr long kBlockTrials = 64;
constexpr long kWaveBlocks = 256;

struct StepAccumulators {
  std::vector<RunningMoments> belief;
  std::vector<RunningMoments> payoff;
  std::vector<RunningMoments> gain;

  explicit StepAccumulators(long horizon)
      : belief(static_cast<std::size_t>(horizon)),
        payoff(static_cast<std::size_t>(horizon)),
        gain(static_cast<std::size_t>(horizon)) {}

  void push(const StepRecord& rec) {
    const auto i = static_cast<std::size_t>(rec.step - 1);
    belief[i].push(rec.belief);
    payoff[i].push(rec.payoff);
    gain[i].push(rec.gain);
  }

  void merge(const StepAccumulators& other) {
    for (std::size_t i = 0; i < belief.size(); ++i) {
      belief[i].merge(other.belief[i]);
      payoff[i].merge(other.payoff[i]);
      gain[i].merge(other.gain[i]);
    }
  }
};

Moments to_moments(const RunningMoments& m) {
  return {m.mean, m.variance(), m.standard_error()};
}

// Runs trials [first, last) of every block in waves, calling
// make() -> Acc, run(Acc&, trial), and fold(Acc&&) in block order.
template <class Make, class Run, class Fold>
void for_blocks(long trials, Make&& make, Run&& run, Fold&& fold) {
  const long blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  for (long wave = 0; wave < blocks; wave += kWaveBlocks) {
    const long count = std::min(kWaveBlocks, blocks - wave);
    std::vector<decltype(make())> accs;
    accs.reserve(static_cast<std::size_t>(count));
    for (long b = 0; b < count; ++b) {
      accs.push_back(make());
    }
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < count; ++b) {
      const long first = (wave + b) * kBlockTrials;
      const long last = std::min(trials, first + kBlockTrials);
      for (long t = first; t < last; ++t) {
        run(accs[static_cast<std::size_t>(b)], t);
      }
    }
    for (auto& acc : accs) {
      fold(std::move(acc));
    }
  }
}

EnsembleStats finish(const SimConfig& config, const StepAccumulators& acc,
                     std::vector<double> final_gains, std::vector<AssetValue> ys) {
  EnsembleStats stats;
  stats.trials = config.trials;
  stats.steps.reserve(static_cast<std::size_t>(config.horizon));
  for (long n = 1; n <= config.horizon; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    stats.steps.push_back(
        {n, to_moments(acc.belief[i]), to_moments(acc.payoff[i]), to_moments(acc.gain[i])});
  }
  stats.final_gain_histogram = make_histogram(final_gains, config.histogram_bins);
  stats.final_gains = std::move(final_gains);
  stats.asset_values = std::move(ys);
  return stats;
}

}  // namespace

void SimConfig::validate() const {
  if (horizon < 1) {
    throw std::invalid_argument("SimConfig: horizon must be >= 1");
  }
  if (trials < 1) {
    throw std::invalid_argument("SimConfig: trials must be >= 1");
  }
  if (histogram_bins < 1) {
    throw std::invalid_argument("SimConfig: histogram needs at least one bin");
  }
}

Trajectory simulate_trajectory(const SimConfig& config, std::uint64_t trial) {
  config.validate();
  Trajectory tr;
  const auto h = static_cast<std::size_t>(config.horizon);
  tr.orders.reserve(h);
  tr.informed.reserve(h);
  tr.beliefs.reserve(h);
  tr.payoffs.reserve(h);
  tr.gains.reserve(h);
  tr.noise_gains.reserve(h);
  tr.maker_gains.reserve(h);
  double noise = 0.0;
  double maker = 0.0;
  tr.y = run_trial(config, trial, [&](const StepRecord& rec) {
    tr.orders.push_back(rec.order);
    tr.informed.push_back(rec.informed);
    tr.beliefs.push_back(rec.belief);
    tr.payoffs.push_back(rec.payoff);
    tr.gains.push_back(rec.gain);
    noise += rec.noise_payoff;
    maker += rec.maker_payoff;
    tr.noise_gains.push_back(noise);
    tr.maker_gains.push_back(maker);
  });
  return tr;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) {
    throw std::invalid_argument("make_histogram: bins must be >= 1");
  }
  double hi = 0.0;
  for (double v : values) {
    hi = std::max(hi, v);
  }
  const double width_range = hi > 0.0 ? hi : 1.0;
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = width_range * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    const double pos = std::max(v, 0.0) / width_range * static_cast<double>(bins);
    const auto b = std::min(bins - 1, static_cast<std::size_t>(pos));
    ++h.counts[b];
  }
  return h;
}

EnsembleStats simulate(const SimConfig& config) {
  config.validate();
  StepAccumulators total(config.horizon);
  std::vector<double> final_gains(static_cast<std::size_t>(config.trials));
  std::vector<AssetValue> ys(static_cast<std::size_t>(config.trials));
  for_blocks(
      config.trials, [&] { return StepAccumulators(config.horizon); },
      [&](StepAccumulators& acc, long t) {
        double last_gain = 0.0;
        ys[static_cast<std::size_t>(t)] =
            run_trial(config, static_cast<std::uint64_t>(t), [&](const StepRecord& rec) {
              acc.push(rec);
              last_gain = rec.gain;
            });
        final_gains[static_cast<std::size_t>(t)] = last_gain;
      },
      [&](StepAccumulators&& acc) { total.merge(acc); });
  return finish(config, total, std::move(final_gains), std::move(ys));
}

namespace serial {

EnsembleStats simulate(const SimConfig& config) {
  config.validate();
  StepAccumulators total(config.horizon);
  std::vector<double> final_gains(static_cast<std::size_t>(config.trials));
  std::vector<AssetValue> ys(static_cast<std::size_t>(config.trials));
  for (long t = 0; t < config.trials; ++t) {
    double last_gain = 0.0;
    ys[static_cast<std::size_t>(t)] =
        run_trial(config, static_cast<std::uint64_t>(t), [&](const StepRecord& rec) {
          total.push(rec);
          last_gain = rec.gain;
        });
    final_gains[static_cast<std::size_t>(t)] = last_gain;
  }
  return finish(config, total, std::move(final_gains), std::move(ys));
}

}  // namespace serial

std::vector<Trajectory> simulate_trajectories(const SimConfig& config) {
  config.validate();
  // orders, flags, and five doubles per step
  constexpr std::size_t kBytesPerStep = 2 + 5 * sizeof(double);
  const double needed = static_cast<double>(config.trials) * static_cast<double>(config.horizon) *
                        static_cast<double>(kBytesPerStep);
  if (needed > static_cast<double>(config.memory_budget_bytes)) {
    throw std::length_error("simulate_trajectories: " + std::to_string(config.trials) + " x " +
                            std::to_string(config.horizon) +
                            " trajectory export exceeds the memory budget");
  }
  std::vector<Trajectory> out(static_cast<std::size_t>(config.trials));
#pragma omp parallel for schedule(dynamic, 16)
  for (long t = 0; t < config.trials; ++t) {
    out[static_cast<std::size_t>(t)] = simulate_trajectory(config, static_cast<std::uint64_t>(t));
  }
  return out;
}

std::vector<BoundRow> empirical_bound_check(const SimConfig& config) {
  config.validate();
  const ModelParams& params = config.params;
  if (!(params.nu() > 0.0)) {
    throw std::domain_error("empirical_bound_check: nu must be > 0");
  }
  const long h = config.horizon;
  std::vector<double> bound(static_cast<std::size_t>(h));
#pragma omp parallel for schedule(dynamic, 4)
  for (long n = 1; n <= h; ++n) {
    bound[static_cast<std::size_t>(n - 1)] = params.temperature() * mutual_info_direct(n, params);
  }

  struct Acc {
    std::vector<RunningMoments> gain;
    std::vector<long> violations;
  };
  Acc total{std::vector<RunningMoments>(static_cast<std::size_t>(h)),
            std::vector<long>(static_cast<std::size_t>(h), 0)};
  for_blocks(
      config.trials,
      [&] {
        return Acc{std::vector<RunningMoments>(static_cast<std::size_t>(h)),
                   std::vector<long>(static_cast<std::size_t>(h), 0)};
      },
      [&](Acc& acc, long t) {
        run_trial(config, static_cast<std::uint64_t>(t), [&](const StepRecord& rec) {
          const auto i = static_cast<std::size_t>(rec.step - 1);
          acc.gain[i].push(rec.gain);
          if (rec.gain > bound[i]) {
            ++acc.violations[i];
          }
        });
      },
      [&](Acc&& acc) {
        for (std::size_t i = 0; i < total.gain.size(); ++i) {
          total.gain[i].merge(acc.gain[i]);
          total.violations[i] += acc.violations[i];
        }
      });

  std::vector<BoundRow> rows;
  rows.reserve(static_cast<std::size_t>(h));
  for (long n = 1; n <= h; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    const RunningMoments& g = total.gain[i];
    rows.push_back({n, g.mean, g.standard_error(), bound[i], bound[i] - g.mean,
                    static_cast<double>(total.violations[i]) /
                        static_cast<double>(config.trials)});
  }
  return rows;
}

std::vector<VarianceDecompositionRow> gain_variance_decomposition(const SimConfig& config) {
  config.validate();
  if (config.trials < 100) {
    throw std::invalid_argument("gain_variance_decomposition: needs at least 100 trials");
  }
  const EnsembleStats stats = simulate(config);
  const long h = config.horizon;
  std::vector<double> payoff_mean(static_cast<std::size_t>(h));
  std::vector<double> gain_mean(static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < stats.steps.size(); ++i) {
    payoff_mean[i] = stats.steps[i].payoff.mean;
    gain_mean[i] = stats.steps[i].gain.mean;
  }

  // Second pass: per-trial excess contribution with the ensemble means fixed.
  using Acc = std::vector<RunningMoments>;
  Acc total(static_cast<std::size_t>(h));
  for_blocks(
      config.trials, [&] { return Acc(static_cast<std::size_t>(h)); },
      [&](Acc& acc, long t) {
        double payoff_dev_sum = 0.0;
        run_trial(config, static_cast<std::uint64_t>(t), [&](const StepRecord& rec) {
          const auto i = static_cast<std::size_t>(rec.step - 1);
          const double dp = rec.payoff - payoff_mean[i];
          const double dg = rec.gain - gain_mean[i];
          payoff_dev_sum += dp * dp;
          acc[i].push(dg * dg - payoff_dev_sum);
        });
      },
      [&](Acc&& acc) {
        for (std::size_t i = 0; i < total.size(); ++i) {
          total[i].merge(acc[i]);
        }
      });

  const double n_trials = static_cast<double>(config.trials);
  const double unbias = n_trials / (n_trials - 1.0);
  std::vector<VarianceDecompositionRow> rows;
  rows.reserve(static_cast<std::size_t>(h));
  CompensatedSum payoff_var_sum;
  for (long n = 1; n <= h; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    payoff_var_sum.add(stats.steps[i].payoff.variance);
    const double gv = stats.steps[i].gain.variance;
    const double pv = payoff_var_sum.value();
    rows.push_back({n, gv, pv, gv - pv, total[i].standard_error() * unbias});
  }
  return rows;
}

MomentEstimate empirical_payoff_product(const SimConfig& config, long n, long m) {
  if (m < 1 || m >= n) {
    throw std::out_of_range("empirical_payoff_product: need 1 <= m < n");
  }
  SimConfig truncated = config;
  truncated.horizon = n;
  truncated.validate();
  RunningMoments total;
  for_blocks(
      truncated.trials, [] { return RunningMoments{}; },
      [&](RunningMoments& acc, long t) {
        double earlier = 0.0;
        run_trial(truncated, static_cast<std::uint64_t>(t), [&](const StepRecord& rec) {
          if (rec.step == m) {
            earlier = rec.payoff;
          } else if (rec.step == n) {
            acc.push(earlier * rec.payoff);
          }
        });
      },
      [&](RunningMoments&& acc) { total.merge(acc); });
  return {total.mean, total.standard_error()};
}

long empirical_variance_peak(const EnsembleStats& stats) {
  if (stats.steps.empty()) {
    throw std::invalid_argument("empirical_variance_peak: no steps");
  }
  const auto it = std::max_element(stats.steps.begin(), stats.steps.end(),
                                   [](const StepSummary& a, const StepSummary& b) {
                                     return a.belief.variance < b.belief.variance;
                                   });
  return it->step;
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "step,belief_mean,belief_var,belief_se,payoff_mean,payoff_var,payoff_se,"
         "gain_mean,gain_var,gain_se\n";
  for (const StepSummary& s : stats.steps) {
    out << s.step;
    for (const Moments* m : {&s.belief, &s.payoff, &s.gain}) {
      out << ',' << format_real(m->mean) << ',' << format_real(m->variance) << ','
          << format_real(m->standard_error);
    }
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& histogram) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    out << format_real(histogram.edges[b]) << ',' << format_real(histogram.edges[b + 1]) << ','
        << histogram.counts[b] << '\n';
  }
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  out << "trial,step,y,order,belief,payoff,gain\n";
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    const Trajectory& tr = trajectories[t];
    for (std::size_t i = 0; i < tr.orders.size(); ++i) {
      out << t << ',' << i + 1 << ',' << to_int(tr.y) << ',' << to_int(tr.orders[i]) << ','
          << format_real(tr.beliefs[i]) << ',' << format_real(tr.payoffs[i]) << ','
          << format_real(tr.gains[i]) << '\n';
    }
  }
}

}  // namespace gm
