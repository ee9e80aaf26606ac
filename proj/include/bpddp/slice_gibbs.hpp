// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "bpddp/archive.hpp"
#include "bpddp/distributions.hpp"
#include "bpddp/mixture_model.hpp"
#include "bpddp/rng.hpp"
#include "bpddp/stick_prior.hpp"

namespace bpddp {

/// Full augmented state of the blocked Gibbs sampler (two series).
/// V_k holds the beta factors of stick index k: (v0,v1,v2) under H1 and
/// (v0,v1) under H2 with the convention v2 = 1, so S_1k = v0 v1 and
/// S_2k = v0 v2 in both schemes.
struct GibbsState {
  Scheme scheme = Scheme::H1;
  double discount = 0.0;
  std::vector<std::vector<int>> D;       // allocations, 1-based components
  std::vector<std::vector<double>> U;    // slice variables in (0,1)
  std::vector<std::array<double, 3>> V;  // stick factors per index
  std::vector<Atom> phi;                 // atoms, phi[k-1]
  double alpha1 = 1.0, alpha2 = 1.0;

  int K() const { return static_cast<int>(V.size()); }
  double stick(int i, int k) const {  // i in {1,2}, k >= 1
    const auto& v = V[k - 1];
    return v[0] * (i == 1 ? v[1] : v[2]);
  }
};

/// Occupancy statistics of the allocation matrix for k = 1..K.
struct Occupancy {
  std::vector<std::array<int, 2>> A;  // A[k-1][i-1] = #{j : D_ij = k}
  std::vector<std::array<int, 2>> B;  // B[k-1][i-1] = #{j : D_ij > k}
  std::vector<int> occupied;          // sorted D^*
  int dstar = 0;                      // max occupied index

  bool is_occupied(int k) const {
    return k <= static_cast<int>(A.size()) && (A[k - 1][0] + A[k - 1][1] > 0);
  }
};

Occupancy compute_occupancy(const std::vector<std::vector<int>>& D, int K);

struct MhTuning {
  double tau2 = 0.05;   // Gaussian random-walk variance for V moves
  double kappa = 2.0;   // gamma random-walk scale for alpha moves
  bool kappa_autotune = true;
  double kappa_target = 0.5;
  int autotune_window = 200;  // sweeps per adaptation step (burn-in only)
};

struct AlphaPrior {
  GammaParams alpha1{0.01, 0.01};
  GammaParams alpha2{0.01, 0.01};
};

struct ChainSchedule {
  int sweeps = 20000;
  int burn_in = 10000;
  int thin = 10;
  std::uint64_t seed = 1;
};

struct EngineOptions {
  MhTuning tuning;
  AlphaPrior alpha_prior;
  bool update_alpha = true;
  bool update_atoms = true;
  bool update_sticks = true;
  // >0 freezes the truncation level: K components, last weight is the
  // remainder mass (final stick = 1), no tail extension. Used by the exact
  // finite-mixture mode and its enumeration tests.
  int fixed_truncation = 0;
  double weight_floor = 1e-300;
  // Called every progress_every sweeps when set (the CLI's run log).
  std::function<void(int sweep, const GibbsState&)> progress;
  int progress_every = 1000;
};

struct MhCounters {
  long long vstar_accepted = 0, vstar_attempted = 0;
  long long vss_accepted = 0, vss_attempted = 0;
  long long alpha_accepted = 0, alpha_attempted = 0;
};

/// Blocked slice Gibbs sampler: (V*,alpha) -> V** (and tail) -> U ->
/// N* -> atoms -> D, in that order, once per sweep.
class SliceGibbs {
 public:
  SliceGibbs(Scheme scheme, double discount, ConditionallyGaussianModel& model,
             EngineOptions opts);

  GibbsState init_state(RandomStream& rng) const;
  void do_sweep(GibbsState& state, RandomStream& rng);
  ChainArchive run(const ChainSchedule& schedule);

  // Individual blocks (sub-steps of do_sweep), exposed for testing.
  void update_vstar_and_alpha(GibbsState& state, const Occupancy& occ,
                              RandomStream& rng);
  void update_vstarstar_and_tail(GibbsState& state, const Occupancy& occ,
                                 RandomStream& rng);
  void update_slices(GibbsState& state, RandomStream& rng);
  /// Returns N*_ij per observation; may extend V with prior draws.
  std::vector<std::vector<int>> compute_nstar(GibbsState& state,
                                              RandomStream& rng);
  void update_atoms(GibbsState& state, const Occupancy& occ, int upto_k,
                    RandomStream& rng);
  void update_allocations(GibbsState& state,
                          const std::vector<std::vector<int>>& nstar,
                          RandomStream& rng);

  /// log Q_k(v | D, alpha) up to constants free of v (F2 target).
  double log_qk(const GibbsState& state, const Occupancy& occ, int k,
                const std::array<double, 3>& v) const;
  /// log of the alpha full conditional given the represented stick factors
  /// (up to a constant): the k-indexed factor priors over every stored
  /// component plus the gamma hyperprior.
  double log_alpha_conditional(const GibbsState& state, double a1,
                               double a2) const;

  /// Acceptance probability of the exact independence proposal on alpha
  /// (gamma proposals with posterior-adjusted rates); the beta-function
  /// ratio form. Exposed for verification; run uses the random walk.
  double alpha_independence_accept_prob(const GibbsState& state,
                                        double a1_new, double a2_new) const;

  const MhCounters& counters() const { return counters_; }
  MhTuning& tuning() { return opts_.tuning; }
  const EngineOptions& options() const { return opts_; }
  ConditionallyGaussianModel& model() { return model_; }
  int last_max_nstar() const { return last_max_nstar_; }

  /// Prior beta factors of stick index k at the state's current alpha.
  std::array<BetaParams, 3> prior_factor_laws(const GibbsState& state,
                                              int k) const;
  std::array<double, 3> draw_prior_factors(const GibbsState& state, int k,
                                           RandomStream& rng) const;

 private:
  void move_stick_factors(GibbsState& state, const Occupancy& occ, int k,
                          double tau, int nf, long long& accepted,
                          long long& attempted, RandomStream& rng) const;

  struct WeightCache {
    // prefix[i][k] = sum_{m<=k} log(1 - S_im); prefix[i][0] = 0.
    std::array<std::vector<double>, 2> log_s;
    std::array<std::vector<double>, 2> prefix;
    void rebuild(const GibbsState& state, int fixed_truncation);
    void append(const GibbsState& state, int k);
    double log_w(int i, int k) const {
      return log_s[i - 1][k - 1] + prefix[i - 1][k - 1];
    }
    double w(int i, int k) const { return std::exp(log_w(i, k)); }
  };

  void rebuild_cache(const GibbsState& state);
  void update_slices_impl(GibbsState& state, RandomStream& rng);
  std::vector<std::vector<int>> compute_nstar_impl(GibbsState& state,
                                                   RandomStream& rng);
  void update_allocations_impl(GibbsState& state,
                               const std::vector<std::vector<int>>& nstar,
                               RandomStream& rng);
  void refresh_atom_soa(const GibbsState& state, int upto_k);
  void trim(GibbsState& state, int keep) const;

  Scheme scheme_;
  double discount_;
  ConditionallyGaussianModel& model_;
  EngineOptions opts_;
  MhCounters counters_;
  WeightCache cache_;
  bool cache_valid_ = false;
  int last_max_nstar_ = 0;
  // SoA view of atoms for vectorized kernel evaluation.
  std::vector<double> atom_mu_, atom_nhiv_, atom_lognorm_;
};

/// New observation pair from the posterior predictive at the current state.
/// Extends the measure with fresh prior components until the remainder mass
/// drops below 1e-10. Uses its own rng; the chain stream is not touched.
std::pair<double, double> predictive_sample(const GibbsState& state,
                                            const ConditionallyGaussianModel& model,
                                            const EngineOptions& opts,
                                            RandomStream& rng);

}  // namespace bpddp
