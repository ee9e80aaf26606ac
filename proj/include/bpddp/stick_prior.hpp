// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <vector>

#include "bpddp/distributions.hpp"
#include "bpddp/rng.hpp"

namespace bpddp {

/// Which beta-product scheme couples the stick variables across series.
/// H1 shares one factor across all series (identical marginals); H2 nests
/// the factors, giving ordered sticks and per-series precisions.
enum class Scheme { H1, H2 };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct StickConstruction {
  Scheme scheme = Scheme::H1;
  int r = 2;                    // number of series
  std::vector<double> alphas;   // H1: (a1, a2); H2: (a1..ar)
  double discount = 0.0;        // l in [0,1); 0 gives DP marginals

  void validate() const;

  /// Number of independent beta factors per stick index.
  int factor_count() const;
  /// Law of factor m (0-based) at stick index k (1-based). For discount 0
  /// the laws do not depend on k.
  BetaParams factor_law(int m, int k) const;
  /// Factors whose product is S_{ik}, as indices into the factor vector.
  std::vector<int> factors_of_series(int i) const;  // i is 1-based
  /// Marginal law of S_{ik}: Beta(1-l, theta_i + l k).
  BetaParams marginal_law(int i, int k) const;
  /// Marginal precision theta_i (alpha1+alpha2 under H1,
  /// alpha1+...+alpha_{r-i+1} under H2).
  double marginal_precision(int i) const;
};

enum class AtomMode { Common, Product, Anova };

/// How atom vectors are drawn per stick index. Common shares one H0 draw
/// across series; Product draws each series from its own marginal; Anova
/// adds per-series offsets to an overall level.
struct AtomScheme {
  AtomMode mode = AtomMode::Common;
  std::function<double(RandomStream&)> base;  // H0 (Common), overall level (Anova)
  std::vector<std::function<double(RandomStream&)>> per_series;  // Product
  std::function<double(RandomStream&)> offset;                   // Anova

  static AtomScheme common(std::function<double(RandomStream&)> h0);
  std::vector<double> sample(int r, RandomStream& rng) const;
};

struct TruncatedMeasureVector {
  int K = 0;
  int r = 0;
  // Series-major storage: entry (k,i) lives at (i-1)*K + (k-1), so each
  // series' weight sequence is contiguous (reductions vectorize directly).
  std::vector<double> sticks;
  std::vector<double> weights;
  std::vector<double> atoms;
  std::vector<double> remainder;  // per series, prod_k (1 - S_ik)
  // Per-index factor laws; rows are i.i.d. only when discount == 0.
  std::vector<std::vector<BetaParams>> factor_params;

  double stick(int k, int i) const { return sticks[idx(k, i)]; }
  double weight(int k, int i) const { return weights[idx(k, i)]; }
  double atom(int k, int i) const { return atoms[idx(k, i)]; }
  std::size_t idx(int k, int i) const {
    return static_cast<std::size_t>(i - 1) * K + (k - 1);
  }
};

/// One stick vector S_k = (S_1k,...,S_rk) from the beta-product construction.
std::vector<double> sample_stick_vector(const StickConstruction& c, int k,
                                        RandomStream& rng);

/// Exact moments of (S_i1, S_j1) from the shared-factor decomposition.
struct StickMoments {
  double e_i, e_j;      // E[S_i], E[S_j]
  double e2_i, e2_j;    // E[S_i^2], E[S_j^2]
  double e_ij;          // E[S_i S_j]
};
StickMoments stick_moments(const StickConstruction& c, int i, int j);

/// Pearson correlation of (S_i1, S_j1); requires discount == 0.
double stick_correlation(const StickConstruction& c, int i, int j);

/// Correlation factor C_{i,j} between measures (equals Cor(G_i(A), G_j(A))
/// under common atoms); moment-based, requires discount == 0.
double measure_correlation(const StickConstruction& c, int i, int j);

TruncatedMeasureVector sample_truncated_measures(const StickConstruction& c,
                                                 const AtomScheme& atoms,
                                                 int K, RandomStream& rng);

}  // namespace bpddp
