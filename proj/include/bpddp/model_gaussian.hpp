// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <string>
#include <vector>

#include "bpddp/mixture_model.hpp"

namespace bpddp {

struct GaussianModelSpec {
  double s2 = 0.1;      // base-measure precision hyperparameter
  double lambda = 0.5;  // IG(lambda, lambda) on component variances
  // Gamma hyperprior on (alpha1, alpha2): (zeta11, zeta21, zeta12, zeta22).
  std::array<double, 4> zeta{0.01, 0.01, 0.01, 0.01};

  NormalInverseGammaParams base() const { return {s2, lambda, lambda}; }
  GammaParams alpha1_prior() const { return {zeta[0], zeta[1]}; }
  GammaParams alpha2_prior() const { return {zeta[2], zeta[3]}; }
  void validate() const;
};

double kernel_logdensity(double y, const Atom& atom);

/// One Gibbs sub-sweep of the conjugate posterior (mu | sigma2, then
/// sigma2 | mu) for a cluster holding `values`, pooled across both series.
Atom update_atom_conjugate(std::span<const double> values, const Atom& current,
                           const GaussianModelSpec& spec, RandomStream& rng);

enum class MixModel { Mix1, Mix2, Mix3 };
const char* mix_name(MixModel m);
MixModel mix_from_name(const std::string& name);

struct MixComponent {
  double weight, mean, var;
};
/// Exact component tables of the synthetic generators, per series.
std::array<std::vector<MixComponent>, 2> mix_components(MixModel m);

std::array<std::vector<double>, 2> generate_mix_data(MixModel m, int n,
                                                     RandomStream& rng);

/// Hyperparameter presets: weakly informative (shared by all mix models)
/// and strongly informative (model-specific).
GaussianModelSpec wi_preset();
GaussianModelSpec si_preset(MixModel m);

class GaussianMixtureModel : public ConditionallyGaussianModel {
 public:
  GaussianMixtureModel(std::array<std::vector<double>, 2> data,
                       GaussianModelSpec spec)
      : data_(std::move(data)), spec_(spec) {
    spec_.validate();
  }

  int series_count() const override { return 2; }
  int obs_count(int i) const override {
    return static_cast<int>(data_[i - 1].size());
  }
  double effective_obs(int i, int j) const override { return data_[i - 1][j]; }
  NormalInverseGammaParams base_measure() const override { return spec_.base(); }

  const GaussianModelSpec& spec() const { return spec_; }

 private:
  std::array<std::vector<double>, 2> data_;
  GaussianModelSpec spec_;
};

}  // namespace bpddp
