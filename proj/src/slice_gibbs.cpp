// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/slice_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bpddp/errors.hpp"
#include "bpddp/simd/kernels.hpp"

namespace bpddp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxComponents = 200000;

// Unnormalized beta log kernel; the alpha-free normalizer cancels in the
// Metropolis ratios where this is used.
double log_beta_kernel(double x, const BetaParams& p) {
  return (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x);
}

int distinct_components(const std::vector<int>& row) {
  if (row.empty()) return 0;
  const int kmax = *std::max_element(row.begin(), row.end());
  std::vector<char> seen(kmax + 1, 0);
  int n = 0;
  for (int d : row) {
    if (!seen[d]) {
      seen[d] = 1;
      ++n;
    }
  }
  return n;
}

}  // namespace

Occupancy compute_occupancy(const std::vector<std::vector<int>>& D, int K) {
  Occupancy occ;
  occ.A.assign(K, {0, 0});
  occ.B.assign(K, {0, 0});
  for (int i = 0; i < 2; ++i) {
    for (int d : D[i]) {
      if (d < 1) throw std::invalid_argument("allocation below 1");
      if (d <= K) occ.A[d - 1][i] += 1;
    }
  }
  for (int i = 0; i < 2; ++i) {
    int above = 0;
    for (int k = K; k >= 1; --k) {
      occ.B[k - 1][i] = above;
      above += occ.A[k - 1][i];
    }
  }
  for (int k = 1; k <= K; ++k) {
    if (occ.A[k - 1][0] + occ.A[k - 1][1] > 0) {
      occ.occupied.push_back(k);
      occ.dstar = k;
    }
  }
  return occ;
}

SliceGibbs::SliceGibbs(Scheme scheme, double discount,
                       ConditionallyGaussianModel& model, EngineOptions opts)
    : scheme_(scheme), discount_(discount), model_(model), opts_(opts) {
  if (model_.series_count() != 2)
    throw std::invalid_argument("the sampler handles exactly two series");
  if (!(discount_ >= 0.0) || !(discount_ < 1.0))
    throw std::invalid_argument("discount must lie in [0,1)");
  if (!(opts_.tuning.tau2 > 0.0) || !(opts_.tuning.kappa > 0.0))
    throw std::invalid_argument("tuning scales must be positive");
}

namespace {

std::array<BetaParams, 3> factor_laws_at(Scheme scheme, double discount,
                                         double a1, double a2, int k) {
  StickConstruction c;
  c.scheme = scheme;
  c.r = 2;
  c.alphas = {a1, a2};
  c.discount = discount;
  std::array<BetaParams, 3> laws;
  laws[0] = c.factor_law(0, k);
  laws[1] = c.factor_law(1, k);
  laws[2] = scheme == Scheme::H1 ? c.factor_law(2, k) : BetaParams{1.0, 1.0};
  return laws;
}

}  // namespace

std::array<BetaParams, 3> SliceGibbs::prior_factor_laws(const GibbsState& state,
                                                        int k) const {
  return factor_laws_at(scheme_, discount_, state.alpha1, state.alpha2, k);
}

std::array<double, 3> SliceGibbs::draw_prior_factors(const GibbsState& state,
                                                     int k,
                                                     RandomStream& rng) const {
  const auto laws = prior_factor_laws(state, k);
  std::array<double, 3> v;
  v[0] = sample_beta(laws[0], rng);
  v[1] = sample_beta(laws[1], rng);
  v[2] = scheme_ == Scheme::H1 ? sample_beta(laws[2], rng) : 1.0;
  return v;
}

void SliceGibbs::WeightCache::rebuild(const GibbsState& state,
                                      int fixed_truncation) {
  const int kf = state.K();
  const int total = fixed_truncation > 0 ? fixed_truncation : kf;
  for (int i = 1; i <= 2; ++i) {
    auto& ls = log_s[i - 1];
    auto& pf = prefix[i - 1];
    ls.assign(total, 0.0);
    pf.assign(total + 1, 0.0);
    for (int k = 1; k <= kf; ++k) {
      const double s = state.stick(i, k);
      ls[k - 1] = std::log(s);
      pf[k] = pf[k - 1] + std::log1p(-s);
    }
    if (fixed_truncation > 0) {
      // Final component absorbs the remainder: stick value 1.
      ls[total - 1] = 0.0;
      pf[total] = kNegInf;
    }
  }
}

void SliceGibbs::WeightCache::append(const GibbsState& state, int k) {
  for (int i = 1; i <= 2; ++i) {
    const double s = state.stick(i, k);
    log_s[i - 1].push_back(std::log(s));
    prefix[i - 1].push_back(prefix[i - 1][k - 1] + std::log1p(-s));
  }
}

void SliceGibbs::rebuild_cache(const GibbsState& state) {
  cache_.rebuild(state, opts_.fixed_truncation);
  cache_valid_ = true;
}

GibbsState SliceGibbs::init_state(RandomStream& rng) const {
  GibbsState state;
  state.scheme = scheme_;
  state.discount = discount_;
  state.alpha1 = opts_.alpha_prior.alpha1.shape / opts_.alpha_prior.alpha1.rate;
  state.alpha2 = opts_.alpha_prior.alpha2.shape / opts_.alpha_prior.alpha2.rate;

  const int free_sticks =
      opts_.fixed_truncation > 0 ? opts_.fixed_truncation - 1 : 1;
  state.V.resize(free_sticks);
  for (int k = 1; k <= free_sticks; ++k)
    state.V[k - 1] = draw_prior_factors(state, k, rng);
  state.phi.resize(opts_.fixed_truncation > 0 ? opts_.fixed_truncation : 1);
  for (auto& atom : state.phi)
    atom = gaussian_atom_prior_draw(model_.base_measure(), rng);

  state.D.resize(2);
  state.U.resize(2);
  for (int i = 1; i <= 2; ++i) {
    const int n = model_.obs_count(i);
    state.D[i - 1].assign(n, 1);
    state.U[i - 1].resize(n);
    const double w1 = state.stick(i, 1);
    for (int j = 0; j < n; ++j) state.U[i - 1][j] = rng.uniform() * w1;
  }
  return state;
}

double SliceGibbs::log_qk(const GibbsState& state, const Occupancy& occ, int k,
                          const std::array<double, 3>& v) const {
  const auto laws = prior_factor_laws(state, k);
  const int nf = scheme_ == Scheme::H1 ? 3 : 2;
  double lp = 0.0;
  for (int m = 0; m < nf; ++m) lp += log_beta_kernel(v[m], laws[m]);
  for (int i = 1; i <= 2; ++i) {
    const double s = v[0] * (i == 1 ? v[1] : v[2]);
    const int a = occ.A[k - 1][i - 1];
    const int b = occ.B[k - 1][i - 1];
    if (a > 0) lp += a * std::log(s);
    if (b > 0) lp += b * std::log1p(-s);
  }
  return lp;
}

double SliceGibbs::log_alpha_conditional(const GibbsState& state, double a1,
                                         double a2) const {
  if (!(a1 > 0.0) || !(a2 > 0.0)) return kNegInf;
  // Every represented stick vector carries an alpha-dependent prior factor,
  // gap components included. Restricting to the occupied set (as the
  // printed conditional does) only matches when the occupied indices have
  // no gaps; the full product is what keeps the joint chain invariant.
  const int nf = scheme_ == Scheme::H1 ? 3 : 2;
  double lp = gamma_logpdf(a1, opts_.alpha_prior.alpha1) +
              gamma_logpdf(a2, opts_.alpha_prior.alpha2);
  for (int k = 1; k <= state.K(); ++k) {
    const auto laws = factor_laws_at(scheme_, discount_, a1, a2, k);
    for (int m = 0; m < nf; ++m)
      lp += beta_logpdf(state.V[k - 1][m], laws[m]);
  }
  return lp;
}

double SliceGibbs::alpha_independence_accept_prob(const GibbsState& state,
                                                  double a1_new,
                                                  double a2_new) const {
  // With gamma proposals whose rates absorb the stick log terms, everything
  // cancels except the beta-function normalizers of the factor priors.
  const int nf = scheme_ == Scheme::H1 ? 3 : 2;
  double log_ratio = 0.0;
  for (int k = 1; k <= state.K(); ++k) {
    const auto old_laws =
        factor_laws_at(scheme_, discount_, state.alpha1, state.alpha2, k);
    const auto new_laws = factor_laws_at(scheme_, discount_, a1_new, a2_new, k);
    for (int m = 0; m < nf; ++m) {
      log_ratio += log_beta_fn(old_laws[m].a, old_laws[m].b) -
                   log_beta_fn(new_laws[m].a, new_laws[m].b);
    }
  }
  return std::min(1.0, std::exp(log_ratio));
}

void SliceGibbs::move_stick_factors(GibbsState& state, const Occupancy& occ,
                                    int k, double tau, int nf,
                                    long long& accepted, long long& attempted,
                                    RandomStream& rng) const {
  // One Metropolis move per beta factor, each a Gaussian random-walk step
  // with the common scale; proposals outside (0,1) are rejected outright.
  // Per-coordinate moves keep the acceptance rate in the tuned band where
  // a joint proposal on all factors stalls on the most concentrated one.
  auto& v = state.V[k - 1];
  double log_q_cur = log_qk(state, occ, k, v);
  for (int m = 0; m < nf; ++m) {
    const double step = tau * sample_normal(0.0, 1.0, rng);
    attempted += 1;
    const double proposed = v[m] + step;
    if (!(proposed > 0.0 && proposed < 1.0)) continue;
    std::array<double, 3> prop = v;
    prop[m] = proposed;
    const double log_q_prop = log_qk(state, occ, k, prop);
    const double delta = log_q_prop - log_q_cur;
    if (delta >= 0.0 || std::log(rng.uniform()) < delta) {
      v = prop;
      log_q_cur = log_q_prop;
      accepted += 1;
    }
  }
}

void SliceGibbs::update_vstar_and_alpha(GibbsState& state, const Occupancy& occ,
                                        RandomStream& rng) {
  const double tau = std::sqrt(opts_.tuning.tau2);
  const int nf = scheme_ == Scheme::H1 ? 3 : 2;
  const int free_sticks = state.K();

  for (int k : occ.occupied) {
    if (k > free_sticks) continue;
    move_stick_factors(state, occ, k, tau, nf, counters_.vstar_accepted,
                       counters_.vstar_attempted, rng);
  }

  if (opts_.update_alpha) {
    const double kappa = opts_.tuning.kappa;
    const double a1 = state.alpha1;
    const double a2 = state.alpha2;
    const GammaParams q1{kappa * a1 * a1, kappa * a1};
    const GammaParams q2{kappa * a2 * a2, kappa * a2};
    const double p1 = sample_gamma(q1, rng);
    const double p2 = sample_gamma(q2, rng);
    counters_.alpha_attempted += 1;
    // A proposal so close to zero that the reverse-move gamma parameters
    // underflow cannot be scored; treat it as rejected.
    if (p1 > 0.0 && p2 > 0.0 && kappa * p1 * p1 > 0.0 &&
        kappa * p2 * p2 > 0.0) {
      const GammaParams r1{kappa * p1 * p1, kappa * p1};
      const GammaParams r2{kappa * p2 * p2, kappa * p2};
      const double log_acc = log_alpha_conditional(state, p1, p2) -
                             log_alpha_conditional(state, a1, a2) +
                             gamma_logpdf(a1, r1) + gamma_logpdf(a2, r2) -
                             gamma_logpdf(p1, q1) - gamma_logpdf(p2, q2);
      if (log_acc >= 0.0 || std::log(rng.uniform()) < log_acc) {
        state.alpha1 = p1;
        state.alpha2 = p2;
        counters_.alpha_accepted += 1;
      }
    }
  }
  cache_valid_ = false;
}

void SliceGibbs::update_vstarstar_and_tail(GibbsState& state,
                                           const Occupancy& occ,
                                           RandomStream& rng) {
  const double tau = std::sqrt(opts_.tuning.tau2);
  const int nf = scheme_ == Scheme::H1 ? 3 : 2;
  const int free_sticks = state.K();

  for (int k = 1; k <= std::min(occ.dstar, free_sticks); ++k) {
    if (occ.is_occupied(k)) continue;
    move_stick_factors(state, occ, k, tau, nf, counters_.vss_accepted,
                       counters_.vss_attempted, rng);
  }

  // Components past D* are conditionally prior draws.
  for (int k = occ.dstar + 1; k <= free_sticks; ++k)
    state.V[k - 1] = draw_prior_factors(state, k, rng);
  cache_valid_ = false;
}

void SliceGibbs::update_slices(GibbsState& state, RandomStream& rng) {
  rebuild_cache(state);
  update_slices_impl(state, rng);
}

void SliceGibbs::update_slices_impl(GibbsState& state, RandomStream& rng) {
  for (int i = 1; i <= 2; ++i) {
    auto& urow = state.U[i - 1];
    const auto& drow = state.D[i - 1];
    for (std::size_t j = 0; j < drow.size(); ++j) {
      const double w = cache_.w(i, drow[j]);
      if (!(w >= opts_.weight_floor))
        throw NumericError(
            "slice weight underflow: component " + std::to_string(drow[j]) +
            " of series " + std::to_string(i) +
            " has weight below the floor; truncation diagnostics needed");
      urow[j] = rng.uniform() * w;
    }
  }
}

std::vector<std::vector<int>> SliceGibbs::compute_nstar(GibbsState& state,
                                                        RandomStream& rng) {
  rebuild_cache(state);
  return compute_nstar_impl(state, rng);
}

std::vector<std::vector<int>> SliceGibbs::compute_nstar_impl(
    GibbsState& state, RandomStream& rng) {
  std::vector<std::vector<int>> nstar(2);
  int max_n = 0;
  if (opts_.fixed_truncation > 0) {
    for (int i = 1; i <= 2; ++i)
      nstar[i - 1].assign(state.U[i - 1].size(), opts_.fixed_truncation);
    max_n = opts_.fixed_truncation;
  } else {
    for (int i = 1; i <= 2; ++i) {
      const auto& urow = state.U[i - 1];
      nstar[i - 1].resize(urow.size());
      for (std::size_t j = 0; j < urow.size(); ++j) {
        const double log_u = std::log(urow[j]);
        int k = 1;
        for (;;) {
          while (state.K() < k) {
            if (state.K() >= kMaxComponents)
              throw NumericError("slice truncation exploded past cap");
            state.V.push_back(
                draw_prior_factors(state, state.K() + 1, rng));
            cache_.append(state, state.K());
          }
          if (cache_.prefix[i - 1][k] < log_u) break;
          ++k;
        }
        const int n = std::max(k, state.D[i - 1][j]);
        nstar[i - 1][j] = n;
        max_n = std::max(max_n, n);
      }
    }
  }
  last_max_nstar_ = max_n;
  return nstar;
}

void SliceGibbs::update_atoms(GibbsState& state, const Occupancy& occ,
                              int upto_k, RandomStream& rng) {
  if (static_cast<int>(state.phi.size()) < upto_k) state.phi.resize(upto_k);

  // Bucket member values (effective observations) by component.
  std::vector<std::vector<double>> members(upto_k);
  for (int i = 1; i <= 2; ++i) {
    const auto& drow = state.D[i - 1];
    for (std::size_t j = 0; j < drow.size(); ++j) {
      if (drow[j] <= upto_k)
        members[drow[j] - 1].push_back(
            model_.effective_obs(i, static_cast<int>(j)));
    }
  }

  const auto base = model_.base_measure();
  for (int k = 1; k <= upto_k; ++k) {
    if (!members[k - 1].empty()) {
      state.phi[k - 1] =
          gaussian_conjugate_step(members[k - 1], state.phi[k - 1], base, rng);
    } else {
      state.phi[k - 1] = gaussian_atom_prior_draw(base, rng);
    }
  }
  (void)occ;
}

void SliceGibbs::refresh_atom_soa(const GibbsState& state, int upto_k) {
  atom_mu_.resize(upto_k);
  atom_nhiv_.resize(upto_k);
  atom_lognorm_.resize(upto_k);
  for (int k = 0; k < upto_k; ++k) {
    const Atom& a = state.phi[k];
    atom_mu_[k] = a.mu;
    atom_nhiv_[k] = -0.5 / a.sigma2;
    atom_lognorm_[k] = -0.5 * std::log(2.0 * M_PI * a.sigma2);
  }
}

void SliceGibbs::update_allocations(GibbsState& state,
                                    const std::vector<std::vector<int>>& nstar,
                                    RandomStream& rng) {
  rebuild_cache(state);
  update_allocations_impl(state, nstar, rng);
}

void SliceGibbs::update_allocations_impl(
    GibbsState& state, const std::vector<std::vector<int>>& nstar,
    RandomStream& rng) {
  int max_n = 0;
  for (const auto& row : nstar)
    for (int n : row) max_n = std::max(max_n, n);
  if (static_cast<int>(state.phi.size()) < max_n)
    throw std::logic_error("atoms missing for allocation update");
  refresh_atom_soa(state, max_n);

  std::vector<double> logdens(max_n), probs(max_n), shifted(max_n);
  for (int i = 1; i <= 2; ++i) {
    auto& drow = state.D[i - 1];
    const auto& urow = state.U[i - 1];
    for (std::size_t j = 0; j < drow.size(); ++j) {
      const int m = nstar[i - 1][j];
      const double y = model_.effective_obs(i, static_cast<int>(j));
      std::span<double> ld(logdens.data(), m);
      simd::gauss_logpdf_batch(y, {atom_mu_.data(), static_cast<std::size_t>(m)},
                               {atom_nhiv_.data(), static_cast<std::size_t>(m)},
                               {atom_lognorm_.data(), static_cast<std::size_t>(m)},
                               ld);
      const double log_u = std::log(urow[j]);
      double best = kNegInf;
      for (int d = 1; d <= m; ++d) {
        if (cache_.log_w(i, d) > log_u && ld[d - 1] > best) best = ld[d - 1];
      }
      if (best == kNegInf)
        throw NumericError("empty allocation candidate set (underflow)");
      for (int d = 1; d <= m; ++d)
        shifted[d - 1] =
            cache_.log_w(i, d) > log_u ? ld[d - 1] - best : kNegInf;
      simd::exp_batch({shifted.data(), static_cast<std::size_t>(m)},
                      {probs.data(), static_cast<std::size_t>(m)});
      double total = 0.0;
      for (int d = 0; d < m; ++d) total += probs[d];
      const double target = rng.uniform() * total;
      double cum = 0.0;
      int pick = 0;
      for (int d = 0; d < m; ++d) {
        cum += probs[d];
        if (target < cum) {
          pick = d + 1;
          break;
        }
      }
      if (pick == 0) {
        for (int d = m; d >= 1; --d) {
          if (probs[d - 1] > 0.0) {
            pick = d;
            break;
          }
        }
      }
      drow[j] = pick;
    }
  }
}

void SliceGibbs::trim(GibbsState& state, int keep) const {
  if (opts_.fixed_truncation > 0) return;
  keep = std::max(keep, 1);
  if (state.K() > keep) state.V.resize(keep);
  if (static_cast<int>(state.phi.size()) > keep) state.phi.resize(keep);
}

void SliceGibbs::do_sweep(GibbsState& state, RandomStream& rng) {
  const int total =
      opts_.fixed_truncation > 0 ? opts_.fixed_truncation : state.K();
  Occupancy occ = compute_occupancy(state.D, total);

  if (opts_.update_sticks) {
    update_vstar_and_alpha(state, occ, rng);
    update_vstarstar_and_tail(state, occ, rng);
  }
  rebuild_cache(state);
  update_slices_impl(state, rng);
  auto nstar = compute_nstar_impl(state, rng);
  const int upto = opts_.fixed_truncation > 0 ? opts_.fixed_truncation
                                              : last_max_nstar_;
  if (opts_.update_atoms) update_atoms(state, occ, upto, rng);
  update_allocations_impl(state, nstar, rng);
  model_.update_auxiliary(state, rng);

  int dstar_new = 1;
  for (int i = 0; i < 2; ++i)
    for (int d : state.D[i]) dstar_new = std::max(dstar_new, d);
  trim(state, dstar_new);
  cache_valid_ = false;
}

ChainArchive SliceGibbs::run(const ChainSchedule& schedule) {
  if (schedule.sweeps <= schedule.burn_in || schedule.burn_in < 0)
    throw ConfigError("schedule must satisfy sweeps > burn_in >= 0");
  if (schedule.thin < 1) throw ConfigError("thin must be >= 1");

  RandomStream root(schedule.seed);
  RandomStream chain_rng = root.spawn(0);
  RandomStream pred_rng = root.spawn(1);

  GibbsState state = init_state(chain_rng);
  counters_ = MhCounters{};

  ChainArchive archive;
  archive.set_meta("schema", "bpddp-chain-v1");
  archive.set_meta("scheme", scheme_name(scheme_));
  archive.set_meta("discount", format_double(discount_));
  archive.set_meta("atoms", "common");
  archive.set_meta("n1", std::to_string(model_.obs_count(1)));
  archive.set_meta("n2", std::to_string(model_.obs_count(2)));
  archive.set_meta("sweeps", std::to_string(schedule.sweeps));
  archive.set_meta("burn_in", std::to_string(schedule.burn_in));
  archive.set_meta("thin", std::to_string(schedule.thin));
  archive.set_meta("seed", std::to_string(schedule.seed));
  archive.set_meta("tau2", format_double(opts_.tuning.tau2));
  archive.set_meta("kappa_initial", format_double(opts_.tuning.kappa));
  archive.set_meta("simd", simd::name(simd::active()));

  long long window_acc = 0, window_att = 0;

  for (int s = 1; s <= schedule.sweeps; ++s) {
    do_sweep(state, chain_rng);

    TraceRow tr;
    tr.sweep = s;
    tr.clusters = {distinct_components(state.D[0]),
                   distinct_components(state.D[1])};
    tr.alpha1 = state.alpha1;
    tr.alpha2 = state.alpha2;
    int dstar = 0;
    for (int i = 0; i < 2; ++i)
      for (int d : state.D[i]) dstar = std::max(dstar, d);
    tr.dstar = dstar;
    tr.nstar = last_max_nstar_;
    archive.traces.push_back(tr);

    if (opts_.progress && s % opts_.progress_every == 0)
      opts_.progress(s, state);

    // Adapt kappa toward the target acceptance during burn-in, then freeze.
    if (opts_.tuning.kappa_autotune && opts_.update_alpha &&
        s <= schedule.burn_in && s % opts_.tuning.autotune_window == 0) {
      const long long att = counters_.alpha_attempted - window_att;
      const long long acc = counters_.alpha_accepted - window_acc;
      if (att > 0) {
        const double rate = static_cast<double>(acc) / att;
        const double next =
            opts_.tuning.kappa * std::exp(opts_.tuning.kappa_target - rate);
        opts_.tuning.kappa = std::clamp(next, 1e-3, 1e6);
      }
      window_att = counters_.alpha_attempted;
      window_acc = counters_.alpha_accepted;
    }

    if (s > schedule.burn_in) {
      const auto [y1, y2] = predictive_sample(state, model_, opts_, pred_rng);
      archive.predictive.push_back({s, y1, y2});

      if ((s - schedule.burn_in) % schedule.thin == 0) {
        ArchiveRecord rec;
        rec.sweep = s;
        rec.alpha1 = state.alpha1;
        rec.alpha2 = state.alpha2;
        rec.vstar_accepted = counters_.vstar_accepted;
        rec.vstar_attempted = counters_.vstar_attempted;
        rec.alpha_accepted = counters_.alpha_accepted;
        rec.alpha_attempted = counters_.alpha_attempted;
        rec.allocations = state.D;
        const int total = opts_.fixed_truncation > 0 ? opts_.fixed_truncation
                                                     : state.K();
        const Occupancy occ = compute_occupancy(state.D, total);
        for (int k : occ.occupied) {
          if (k <= static_cast<int>(state.phi.size()))
            rec.atoms.emplace_back(k, state.phi[k - 1]);
        }
        rec.weights.resize(2);
        for (int i = 1; i <= 2; ++i) {
          double stick_left = 1.0;
          double captured = 0.0;
          std::size_t next = 0;
          for (int k = 1; k <= total && next < rec.atoms.size(); ++k) {
            const double s = (opts_.fixed_truncation > 0 && k == total)
                                 ? 1.0
                                 : state.stick(i, k);
            const double w = s * stick_left;
            stick_left *= 1.0 - s;
            if (rec.atoms[next].first == k) {
              rec.weights[i - 1].push_back(w);
              captured += w;
              ++next;
            }
          }
          rec.weights[i - 1].push_back(std::max(0.0, 1.0 - captured));
        }
        rec.aux = model_.auxiliary_snapshot();
        archive.records.push_back(std::move(rec));
      }
    }
  }

  archive.set_meta("kappa_final", format_double(opts_.tuning.kappa));
  return archive;
}

std::pair<double, double> predictive_sample(const GibbsState& state,
                                            const ConditionallyGaussianModel& model,
                                            const EngineOptions& opts,
                                            RandomStream& rng) {
  // Weights and atoms of the instantiated components, then fresh prior
  // components until the leftover mass is negligible.
  std::vector<std::array<double, 2>> weights;
  std::vector<Atom> atoms;
  std::array<double, 2> remainder = {1.0, 1.0};

  const int kf = state.K();
  const int total = opts.fixed_truncation > 0 ? opts.fixed_truncation : kf;
  weights.reserve(total);
  for (int k = 1; k <= total; ++k) {
    std::array<double, 2> w;
    for (int i = 1; i <= 2; ++i) {
      const double s =
          (opts.fixed_truncation > 0 && k == total) ? 1.0 : state.stick(i, k);
      w[i - 1] = s * remainder[i - 1];
    }
    weights.push_back(w);
    atoms.push_back(k <= static_cast<int>(state.phi.size()) ? state.phi[k - 1]
                                                            : Atom{});
    for (int i = 0; i < 2; ++i)
      remainder[i] *=
          1.0 - ((opts.fixed_truncation > 0 && k == total) ? 1.0
                                                           : state.stick(i + 1, k));
  }

  if (opts.fixed_truncation == 0) {
    StickConstruction c;
    c.scheme = state.scheme;
    c.r = 2;
    c.alphas = {state.alpha1, state.alpha2};
    c.discount = state.discount;
    int k = total;
    while (std::max(remainder[0], remainder[1]) >= 1e-10 && k < 100000) {
      ++k;
      const auto s = sample_stick_vector(c, k, rng);
      std::array<double, 2> w;
      for (int i = 0; i < 2; ++i) {
        w[i] = s[i] * remainder[i];
        remainder[i] *= 1.0 - s[i];
      }
      weights.push_back(w);
      atoms.push_back(gaussian_atom_prior_draw(model.base_measure(), rng));
    }
  }

  std::array<double, 2> draw;
  for (int i = 0; i < 2; ++i) {
    const double xi = rng.uniform();
    double cum = 0.0;
    std::size_t pick = weights.size() - 1;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      cum += weights[k][i];
      if (xi < cum) {
        pick = k;
        break;
      }
    }
    const Atom& a = atoms[pick];
    draw[i] = model.predictive_offset(i + 1) +
              sample_normal(a.mu, std::sqrt(a.sigma2), rng);
  }
  return {draw[0], draw[1]};
}

}  // namespace bpddp
