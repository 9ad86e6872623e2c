#pragma once

#include <vector>

#include "gm/market.hpp"

namespace gm {

/// Number of buy orders k among n orders.
class BuyCount {
 public:
  BuyCount(long n, long k);
  [[nodiscard]] long steps() const { return n_; }
  [[nodiscard]] long buys() const { return k_; }
  /// Net map exponent 2k - n.
  [[nodiscard]] long displacement() const { return 2 * k_ - n_; }

 private:
  long n_;
  long k_;
};

/// Signed iteration count of the buy map; negative values apply the inverse.
struct MapExponent {
  long value;
};

/// theta -> q theta / (q theta + (1 - q)(1 - theta)).
/// Defined for every q in [0, 1]; map_apply(., 1 - q) inverts map_apply(., q).
double map_apply(double theta, double q);

/// d-fold iterate of map_apply(., q), evaluated in closed form via log-odds.
double map_iterate(double theta, double q, MapExponent d);

/// Belief after n orders of which k were buys.
double price_from_buycount(double theta0, double q, BuyCount bc);

/// Binomial(n, p) pmf over k = 0..n with p = q if y is high, 1 - q otherwise.
std::vector<double> buycount_pmf(long n, AssetValue y, double q);

/// Iterates of the buy map from a fixed starting belief.
///
/// Holds the starting log-odds and the per-buy shift, so every iterate is
/// one logistic evaluation of (start + d * shift). Beliefs 0 and 1 are
/// fixed points for every exponent. The log and complement accessors are
/// evaluated in log-odds space and stay accurate when the belief is within
/// 1e-300 of either end.
class BeliefOrbit {
 public:
  BeliefOrbit(double theta0, double q);
  explicit BeliefOrbit(const ModelParams& params);

  [[nodiscard]] double theta(long d) const;
  [[nodiscard]] double complement(long d) const;  // 1 - theta(d)
  [[nodiscard]] double log_theta(long d) const;
  [[nodiscard]] double log_complement(long d) const;
  [[nodiscard]] bool degenerate() const { return degenerate_; }
  [[nodiscard]] double start() const { return theta0_; }

 private:
  [[nodiscard]] double log_odds(long d) const;

  double theta0_;
  double start_log_odds_;
  double step_;
  bool degenerate_;
};

}  // namespace gm
