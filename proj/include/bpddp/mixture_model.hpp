// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "bpddp/distributions.hpp"
#include "bpddp/rng.hpp"

namespace bpddp {

struct GibbsState;

/// Mixture component parameters shared across series (common atoms).
struct Atom {
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// Observation structure the slice sampler understands: every observation
/// reduces to an effective value e_ij = y_ij - offset_ij with Gaussian
/// kernel N(e_ij; mu_k, sigma2_k) and conjugate N x IG base measure.
/// The plain Gaussian mixture has offset 0; the VAR mixture's offset is the
/// regression term, refreshed by its auxiliary block.
class ConditionallyGaussianModel {
 public:
  virtual ~ConditionallyGaussianModel() = default;

  virtual int series_count() const = 0;
  virtual int obs_count(int i) const = 0;  // i is 1-based
  virtual double effective_obs(int i, int j) const = 0;  // j is 0-based
  virtual NormalInverseGammaParams base_measure() const = 0;

  /// Extra Gibbs block run once per sweep after the allocation update.
  virtual void update_auxiliary(const GibbsState& state, RandomStream& rng);
  /// Model parameters outside the DDP state, archived per record.
  virtual std::vector<double> auxiliary_snapshot() const { return {}; }
  /// Offset applied to a fresh draw from kernel i (prediction).
  virtual double predictive_offset(int i) const;
};

/// One draw from the base measure G0.
Atom gaussian_atom_prior_draw(const NormalInverseGammaParams& base,
                              RandomStream& rng);

/// One (mu | sigma2, sigma2 | mu) Gibbs step of the conjugate posterior for
/// a cluster holding `values` (pooled across series).
Atom gaussian_conjugate_step(std::span<const double> values,
                             const Atom& current,
                             const NormalInverseGammaParams& base,
                             RandomStream& rng);

}  // namespace bpddp
