// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "bpddp/mixture_model.hpp"

namespace bpddp {

struct VarModelSpec {
  int p = 4;            // lag order
  double s2 = 0.1;
  double lambda = 0.5;
  std::array<double, 4> zeta{0.01, 0.01, 0.01, 0.01};

  NormalInverseGammaParams base() const { return {s2, lambda, lambda}; }
  GammaParams alpha1_prior() const { return {zeta[0], zeta[1]}; }
  GammaParams alpha2_prior() const { return {zeta[2], zeta[3]}; }
  void validate() const;
};

/// Quarterly growth rate on a monthly index: y_t = log x_t - log x_{t-h}.
/// Output is h entries shorter than the input.
std::vector<double> growth_transform(std::span<const double> levels,
                                     int horizon = 4);

struct VarCoefficients {
  Eigen::VectorXd upsilon1, upsilon2;  // each of length 2p
};

/// Stacked predictor at time t (0-based, t >= p):
/// (y1[t-1..t-p], y2[t-1..t-p]).
Eigen::VectorXd var_predictor(const std::array<std::vector<double>, 2>& y,
                              int p, int t);

/// residual_it = y_it - Z_t' Upsilon_i for t = p..T-1.
std::array<std::vector<double>, 2> residualize(
    const std::array<std::vector<double>, 2>& y, const VarCoefficients& ups,
    int p);

/// Mean of the Upsilon_i full conditional under the flat prior: the
/// weighted-least-squares solution of sum_t Z_t Z_t'/sigma2_it against
/// (y_it - mu_it)/sigma2_it.
VarCoefficients var_posterior_mean(
    const std::array<std::vector<double>, 2>& y,
    const std::array<std::vector<double>, 2>& mu,
    const std::array<std::vector<double>, 2>& sigma2, int p);

/// Draw Upsilon_i from its multivariate-normal full conditional under the
/// flat prior: precision sum_t Z_t Z_t' / sigma2_it, mean as above.
VarCoefficients update_var_coefficients(
    const std::array<std::vector<double>, 2>& y,
    const std::array<std::vector<double>, 2>& mu,
    const std::array<std::vector<double>, 2>& sigma2, int p,
    RandomStream& rng);

/// Mixture-of-VAR model: each time point is one observation per series,
/// with kernel N(y_it; mu_it + Z_t' Upsilon_i, sigma2_it). The shared
/// autoregressive block is refreshed once per sweep after the DDP blocks.
class VarMixtureModel : public ConditionallyGaussianModel {
 public:
  VarMixtureModel(std::array<std::vector<double>, 2> growth, VarModelSpec spec);

  int series_count() const override { return 2; }
  int obs_count(int i) const override {
    return static_cast<int>(data_[i - 1].size()) - spec_.p;
  }
  double effective_obs(int i, int j) const override {
    return data_[i - 1][spec_.p + j] - offsets_[i - 1][j];
  }
  NormalInverseGammaParams base_measure() const override { return spec_.base(); }
  void update_auxiliary(const GibbsState& state, RandomStream& rng) override;
  std::vector<double> auxiliary_snapshot() const override;
  double predictive_offset(int i) const override;

  const VarModelSpec& spec() const { return spec_; }
  const VarCoefficients& coefficients() const { return ups_; }
  void set_coefficients(const VarCoefficients& ups);
  /// Keeps Upsilon fixed; the model then collapses to a Gaussian mixture
  /// on the residuals.
  void freeze_coefficients(bool freeze) { frozen_ = freeze; }
  double regression_offset(int i, int j) const { return offsets_[i - 1][j]; }

 private:
  void refresh_offsets();

  std::array<std::vector<double>, 2> data_;
  VarModelSpec spec_;
  VarCoefficients ups_;
  std::array<std::vector<double>, 2> offsets_;  // Z_t' Upsilon_i per obs
  bool frozen_ = false;
};

/// Synthetic two-regime generator used to exercise the VAR machinery:
/// block-switching intercept/volatility regimes on top of a fixed
/// stationary VAR(p) structure.
struct TwoRegimeVarConfig {
  int T = 300;
  int p = 4;
  int block = 75;  // regime switch period
  double mu_low = -1.5, mu_high = 1.5;
  double sigma2_low = 0.3, sigma2_high = 0.3;
};
std::array<std::vector<double>, 2> generate_two_regime_var(
    const TwoRegimeVarConfig& cfg, RandomStream& rng);
/// The coefficients the generator uses (for oracle comparisons).
VarCoefficients two_regime_var_coefficients(int p);

}  // namespace bpddp
