#include "gm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gm/belief_map.hpp"
#include "gm/entropy.hpp"
#include "gm/numerics.hpp"

namespace gm {

namespace {

double branch_probability(AssetValue y, const ModelParams& params) {
  return y == AssetValue::high ? params.q() : 1.0 - params.q();
}

double prior_weight(AssetValue y, const ModelParams& params) {
  return y == AssetValue::high ? params.theta0() : 1.0 - params.theta0();
}

void require_step(long i, const char* what) {
  if (i < 1) {
    throw std::out_of_range(std::string(what) + ": step index must be >= 1, got " +
                            std::to_string(i));
  }
}

void require_horizon(long n, const char* what) {
  if (n < 0) {
    throw std::out_of_range(std::string(what) + ": step count must be >= 0, got " +
                            std::to_string(n));
  }
}

// Neumaier sum of values[i] * weights[i], largest weight first (ties by index).
double sum_by_descending_weight(const std::vector<double>& weights,
                                const std::vector<double>& values) {
  std::vector<std::size_t> idx(weights.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  CompensatedSum sum;
  for (std::size_t i : idx) {
    if (weights[i] != 0.0) {
      sum.add(weights[i] * values[i]);
    }
  }
  return sum.value();
}

// Sum over the two Y branches, skipping a branch with zero prior mass.
template <class BranchFn>
double mix_branches(const ModelParams& params, std::optional<AssetValue> given, BranchFn&& fn) {
  if (given) {
    return fn(*given);
  }
  double total = 0.0;
  for (AssetValue y : {AssetValue::high, AssetValue::low}) {
    const double w = prior_weight(y, params);
    if (w != 0.0) {
      total += w * fn(y);
    }
  }
  return total;
}

// Joint moment over (earlier buy count j, later increment l):
//   sum_j Bin(j; m-1, p) first(j) sum_l Bin(l; gap, p) second(j, l)
template <class First, class Second>
double nested_binomial_sum(long m, long gap, double p, First&& first, Second&& second) {
  const BinomialLaw outer(m - 1, p);
  const BinomialLaw inner(gap, p);
  return outer.expect([&](long j) {
    const double a = first(j);
    if (a == 0.0) {
      return 0.0;
    }
    return a * inner.expect([&](long l) { return second(j, l); });
  });
}

}  // namespace

double expected_price(long n, AssetValue y, const ModelParams& params) {
  require_horizon(n, "expected_price");
  const BeliefOrbit orbit(params);
  if (orbit.degenerate()) {
    return params.theta0();
  }
  const BinomialLaw law(n, branch_probability(y, params));
  return law.expect([&](long k) { return orbit.theta(2 * k - n); });
}

double price_variance(long n, AssetValue y, const ModelParams& params) {
  require_horizon(n, "price_variance");
  const BeliefOrbit orbit(params);
  if (orbit.degenerate() || n == 0) {
    return 0.0;
  }
  const BinomialLaw law(n, branch_probability(y, params));
  const double mean = law.expect([&](long k) { return orbit.theta(2 * k - n); });
  const double var = law.expect([&](long k) {
    const double dev = orbit.theta(2 * k - n) - mean;
    return dev * dev;
  });
  return std::max(var, 0.0);
}

StepMoments price_moments(long n, AssetValue y, const ModelParams& params) {
  return {n, expected_price(n, y, params), price_variance(n, y, params)};
}

double expected_payoff_exact(long i, const ModelParams& params) {
  require_step(i, "expected_payoff_exact");
  const BeliefOrbit orbit(params);
  const long m = i - 1;
  const double theta = params.theta0();
  double high = 0.0;
  double low = 0.0;
  if (theta != 0.0) {
    const BinomialLaw law(m, params.q());
    high = law.expect([&](long k) { return orbit.complement(2 * k - m + 1); });
  }
  if (theta != 1.0) {
    const BinomialLaw law(m, 1.0 - params.q());
    low = law.expect([&](long k) { return orbit.theta(2 * k - m - 1); });
  }
  return params.nu() * ((1.0 - theta) * low + theta * high);
}

double expected_payoff_via_spread(long i, const ModelParams& params) {
  require_step(i, "expected_payoff_via_spread");
  const double q = params.q();
  if (q == 1.0) {
    return 0.0;
  }
  const BeliefOrbit orbit(params);
  const long m = i - 1;
  const double scale = (2.0 * q - 1.0) / ((1.0 - q) * (1.0 - q));
  auto spread = [&](long k) {
    return scale * orbit.theta(2 * k - m - 1) * orbit.complement(2 * k - m + 1);
  };
  const double total = mix_branches(params, std::nullopt, [&](AssetValue y) {
    const BinomialLaw law(m, branch_probability(y, params));
    return law.expect(spread);
  });
  return (1.0 - q) * total;
}

double payoff_second_moment(long i, const ModelParams& params) {
  require_step(i, "payoff_second_moment");
  const BeliefOrbit orbit(params);
  const long m = i - 1;
  const double total = mix_branches(params, std::nullopt, [&](AssetValue y) {
    const BinomialLaw law(m, branch_probability(y, params));
    if (y == AssetValue::high) {
      return law.expect([&](long k) {
        const double c = orbit.complement(2 * k - m + 1);
        return c * c;
      });
    }
    return law.expect([&](long k) {
      const double b = orbit.theta(2 * k - m - 1);
      return b * b;
    });
  });
  return params.nu() * total;
}

double expected_gain(long n, const ModelParams& params) {
  return expected_gain_prefix(n, params).back();
}

std::vector<double> expected_gain_prefix(long horizon, const ModelParams& params) {
  require_horizon(horizon, "expected_gain_prefix");
  const auto size = static_cast<std::size_t>(horizon);
  std::vector<double> gains(size + 1, 0.0);
  const double nu = params.nu();
  if (horizon == 0 || nu == 0.0) {
    return gains;
  }

  // Payoff given the displacement d of the belief before the order:
  // 1 - ask when Y = 1, bid when Y = 0.
  const BeliefOrbit orbit(params);
  const long offset = horizon + 1;
  std::vector<double> ask_gap(2 * size + 3);
  std::vector<double> bid(2 * size + 3);
  for (long d = -offset; d <= offset; ++d) {
    ask_gap[static_cast<std::size_t>(d + offset)] = orbit.complement(d);
    bid[static_cast<std::size_t>(d + offset)] = orbit.theta(d);
  }

  // Buy-count law of each branch, propagated one order at a time and
  // trimmed to the window where it carries mass above kNegligible.
  constexpr double kNegligible = 1e-40;
  struct Branch {
    double weight;
    double p;
    int shift;  // the informed order moves the ask by +1, the bid by -1
    const std::vector<double>* payoff;
    std::vector<double> mass;
    long lo = 0;
    long hi = 0;
  };
  std::vector<Branch> branches;
  for (AssetValue y : {AssetValue::high, AssetValue::low}) {
    const double w = prior_weight(y, params);
    if (w > 0.0) {
      const bool high = y == AssetValue::high;
      branches.push_back(
          {w, branch_probability(y, params), high ? 1 : -1, high ? &ask_gap : &bid, {}, 0, 0});
      branches.back().mass.assign(size + 1, 0.0);
      branches.back().mass[0] = 1.0;
    }
  }

  CompensatedSum total;
  for (long m = 0; m < horizon; ++m) {
    double step = 0.0;
    for (Branch& b : branches) {
      double acc = 0.0;
      for (long k = b.lo; k <= b.hi; ++k) {
        const long d = 2 * k - m + b.shift;
        acc += b.mass[static_cast<std::size_t>(k)] * (*b.payoff)[static_cast<std::size_t>(d + offset)];
      }
      step += b.weight * acc;

      const double p = b.p;
      auto& mass = b.mass;
      const long top = std::min(b.hi + 1, horizon);
      for (long k = top; k >= b.lo; --k) {
        const auto i = static_cast<std::size_t>(k);
        const double from_below = k > b.lo ? mass[i - 1] : 0.0;
        const double here = k <= b.hi ? mass[i] : 0.0;
        mass[i] = p * from_below + (1.0 - p) * here;
      }
      b.hi = top;
      while (b.lo < b.hi && mass[static_cast<std::size_t>(b.lo)] < kNegligible) {
        mass[static_cast<std::size_t>(b.lo++)] = 0.0;
      }
      while (b.hi > b.lo && mass[static_cast<std::size_t>(b.hi)] < kNegligible) {
        mass[static_cast<std::size_t>(b.hi--)] = 0.0;
      }
    }
    total.add(nu * step);
    gains[static_cast<std::size_t>(m + 1)] = total.value();
  }
  return gains;
}

double conditional_entropy(long n, const ModelParams& params) {
  require_horizon(n, "conditional_entropy");
  const BeliefOrbit orbit(params);
  if (orbit.degenerate()) {
    return 0.0;
  }
  if (n == 0 || params.nu() == 0.0) {
    return binary_entropy(params.theta0());  // the orders carry no information
  }
  const double theta = params.theta0();
  const BinomialLaw high(n, params.q());
  const BinomialLaw low(n, 1.0 - params.q());
  const double a = high.expect([&](long k) { return orbit.log_theta(2 * k - n); });
  const double b = low.expect([&](long k) { return orbit.log_complement(2 * k - n); });
  return -theta * a - (1.0 - theta) * b;
}

double mutual_info_direct(long n, const ModelParams& params) {
  return binary_entropy(params.theta0()) - conditional_entropy(n, params);
}

double step_information(long m, const ModelParams& params) {
  require_horizon(m, "step_information");
  const BeliefOrbit orbit(params);
  if (orbit.degenerate()) {
    return 0.0;
  }
  const double q = params.q();
  const double log_prior = std::log(params.theta0());
  const auto size = static_cast<std::size_t>(m + 1);
  std::vector<double> weights(size);
  std::vector<double> values(size);
  for (long k = 0; k <= m; ++k) {
    const long d = 2 * k - m;
    const auto i = static_cast<std::size_t>(k);
    // P(beta = k) = theta P(beta = k | Y = 1) / theta_m(k)
    weights[i] = std::exp(log_prior + log_binomial_pmf(m, k, q) - orbit.log_theta(d));
    // The gap is symmetric under theta -> 1 - theta; pass the smaller side,
    // which the orbit gives to full relative precision.
    values[i] = weights[i] != 0.0
                    ? entropy_gap(q, std::min(orbit.theta(d), orbit.complement(d)))
                    : 0.0;
  }
  return sum_by_descending_weight(weights, values);
}

double mutual_info_chain(long n, const ModelParams& params) {
  require_horizon(n, "mutual_info_chain");
  CompensatedSum sum;
  for (long m = 0; m < n; ++m) {
    sum.add(step_information(m, params));
  }
  return sum.value();
}

double single_step_mutual_info(Belief belief, const ModelParams& params) {
  return entropy_gap(params.q(), belief.theta());
}

double single_step_mutual_info_expanded(Belief belief, const ModelParams& params) {
  const double theta = belief.theta();
  const double up = params.q();
  const double down = 1.0 - params.q();
  const double sell_prob = up * (1.0 - theta) + down * theta;
  const double buy_prob = down * (1.0 - theta) + up * theta;
  auto term = [](double weight, double lik, double marginal) {
    return weight == 0.0 ? 0.0 : weight * std::log(lik / marginal);
  };
  return term(up * (1.0 - theta), up, sell_prob) + term(down * theta, down, sell_prob) +
         term(down * (1.0 - theta), down, buy_prob) + term(up * theta, up, buy_prob);
}

double payoff_joint_moment(long n, long lag, const ModelParams& params,
                           std::optional<AssetValue> given) {
  if (lag < 1 || lag >= n) {
    throw std::out_of_range("payoff_joint_moment: need 1 <= lag < n, got n=" + std::to_string(n) +
                            " lag=" + std::to_string(lag));
  }
  const BeliefOrbit orbit(params);
  const long m = n - lag;
  const long gap = n - 1 - m;
  const double nu = params.nu();
  return mix_branches(params, given, [&](AssetValue y) {
    const double p = branch_probability(y, params);
    double joint = 0.0;
    if (y == AssetValue::high) {
      // The informed order at step m is a buy.
      joint = nested_binomial_sum(
          m, gap, p, [&](long j) { return orbit.complement(2 * j - m + 2); },
          [&](long j, long l) { return orbit.complement(2 * (j + 1 + l) - n + 2); });
    } else {
      joint = nested_binomial_sum(
          m, gap, p, [&](long j) { return orbit.theta(2 * j - m); },
          [&](long j, long l) { return orbit.theta(2 * (j + l) - n); });
    }
    return nu * nu * joint;
  });
}

double payoff_autocovariance(long n, long lag, const ModelParams& params) {
  const double joint = payoff_joint_moment(n, lag, params);
  return joint - expected_payoff_exact(n, params) * expected_payoff_exact(n - lag, params);
}

double payoff_spread_product_moment(long n, long lag, const ModelParams& params,
                                    std::optional<AssetValue> given) {
  if (lag < 1 || lag >= n) {
    throw std::out_of_range("payoff_spread_product_moment: need 1 <= lag < n");
  }
  const BeliefOrbit orbit(params);
  const long m = n - lag;
  const double q = params.q();
  // Spread before step t given beta buys among the first t - 1 orders.
  auto spread = [&](long t, long beta) {
    const long d = 2 * beta - (t - 1);
    return orbit.theta(d + 1) - orbit.theta(d - 1);
  };
  return mix_branches(params, given, [&](AssetValue y) {
    const double p = branch_probability(y, params);
    const double joint = nested_binomial_sum(
        m, n - m, p, [&](long j) { return spread(m, j); },
        [&](long j, long l) { return spread(n, j + l); });
    return (1.0 - q) * (1.0 - q) * joint;
  });
}

namespace {

ExactSeries allocate_series(long horizon) {
  require_horizon(horizon, "exact_series");
  const auto size = static_cast<std::size_t>(horizon + 1);
  ExactSeries s;
  s.step.resize(size);
  for (auto* v : {&s.price_mean_high, &s.price_var_high, &s.price_mean_low, &s.price_var_low,
                  &s.payoff_mean, &s.payoff_via_spread, &s.payoff_var, &s.gain_mean,
                  &s.conditional_entropy, &s.mi_direct, &s.mi_chain, &s.bound}) {
    v->assign(size, 0.0);
  }
  return s;
}

// Fills every per-step column of row n; mi_chain holds the step increment.
void fill_row(ExactSeries& s, long n, const ModelParams& params) {
  const auto r = static_cast<std::size_t>(n);
  s.step[r] = n;
  s.price_mean_high[r] = expected_price(n, AssetValue::high, params);
  s.price_var_high[r] = price_variance(n, AssetValue::high, params);
  s.price_mean_low[r] = expected_price(n, AssetValue::low, params);
  s.price_var_low[r] = price_variance(n, AssetValue::low, params);
  s.conditional_entropy[r] = conditional_entropy(n, params);
  s.mi_direct[r] = mutual_info_direct(n, params);
  if (n >= 1) {
    s.payoff_mean[r] = expected_payoff_exact(n, params);
    s.payoff_via_spread[r] = expected_payoff_via_spread(n, params);
    s.payoff_var[r] = std::max(0.0, payoff_second_moment(n, params) -
                                        s.payoff_mean[r] * s.payoff_mean[r]);
    s.mi_chain[r] = step_information(n - 1, params);
  }
}

// Serial prefix sums in step order.
void finish_series(ExactSeries& s, const ModelParams& params) {
  CompensatedSum gain;
  CompensatedSum info;
  for (std::size_t r = 1; r < s.size(); ++r) {
    gain.add(s.payoff_mean[r]);
    info.add(s.mi_chain[r]);
    s.gain_mean[r] = gain.value();
    s.mi_chain[r] = info.value();
  }
  const double temp = params.temperature();
  for (std::size_t r = 0; r < s.size(); ++r) {
    s.bound[r] = std::isinf(temp) ? std::numeric_limits<double>::quiet_NaN()
                                  : temp * s.mi_direct[r];
  }
}

}  // namespace

ExactSeries exact_series(long horizon, const ModelParams& params) {
  ExactSeries s = allocate_series(horizon);
#pragma omp parallel for schedule(dynamic, 4)
  for (long n = 0; n <= horizon; ++n) {
    fill_row(s, n, params);
  }
  finish_series(s, params);
  return s;
}

namespace serial {

ExactSeries exact_series(long horizon, const ModelParams& params) {
  ExactSeries s = allocate_series(horizon);
  for (long n = 0; n <= horizon; ++n) {
    fill_row(s, n, params);
  }
  finish_series(s, params);
  return s;
}

}  // namespace serial

}  // namespace gm
