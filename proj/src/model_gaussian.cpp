// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/model_gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace bpddp {

void GaussianModelSpec::validate() const {
  if (!(s2 > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("s2 and lambda must be positive");
  for (double z : zeta)
    if (!(z > 0.0)) throw std::invalid_argument("zeta values must be positive");
}

double kernel_logdensity(double y, const Atom& atom) {
  return normal_logpdf(y, atom.mu, atom.sigma2);
}

Atom update_atom_conjugate(std::span<const double> values, const Atom& current,
                           const GaussianModelSpec& spec, RandomStream& rng) {
  return gaussian_conjugate_step(values, current, spec.base(), rng);
}

const char* mix_name(MixModel m) {
  switch (m) {
    case MixModel::Mix1: return "Mix1";
    case MixModel::Mix2: return "Mix2";
    case MixModel::Mix3: return "Mix3";
  }
  return "?";
}

MixModel mix_from_name(const std::string& name) {
  if (name == "Mix1" || name == "mix1") return MixModel::Mix1;
  if (name == "Mix2" || name == "mix2") return MixModel::Mix2;
  if (name == "Mix3" || name == "mix3") return MixModel::Mix3;
  throw std::invalid_argument("unknown mix model: " + name);
}

std::array<std::vector<MixComponent>, 2> mix_components(MixModel m) {
  const double third = 1.0 / 3.0;
  switch (m) {
    case MixModel::Mix1:
      return {{{{third, -10.0, 1.0}, {third, 0.0, 1.0}, {third, 10.0, 1.0}},
               {{third, -10.0, 1.0}, {third, 0.0, 1.0}, {third, 10.0, 1.0}}}};
    case MixModel::Mix2:
      return {{{{0.25, 0.0, 0.5}, {0.25, 3.0, 0.25}, {0.25, 2.0, 0.25},
                {0.25, 5.0, 0.5}},
               {{0.25, 0.0, 0.5}, {0.25, 3.0, 0.25}, {0.25, -3.0, 0.25},
                {0.25, 7.0, 0.5}}}};
    case MixModel::Mix3:
      return {{{{third, -10.0, 1.0}, {third, 0.0, 1.0}, {third, 10.0, 1.0}},
               {{1.0 / 6.0, -10.0, 1.0},
                {4.0 / 6.0, 0.0, 1.0},
                {1.0 / 6.0, 10.0, 1.0}}}};
  }
  throw std::invalid_argument("unknown mix model");
}

std::array<std::vector<double>, 2> generate_mix_data(MixModel m, int n,
                                                     RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("need at least one observation");
  const auto comps = mix_components(m);
  std::array<std::vector<double>, 2> out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < 2; ++i) {
      const double u = rng.uniform();
      double cum = 0.0;
      const MixComponent* pick = &comps[i].back();
      for (const auto& c : comps[i]) {
        cum += c.weight;
        if (u < cum) {
          pick = &c;
          break;
        }
      }
      out[i].push_back(sample_normal(pick->mean, std::sqrt(pick->var), rng));
    }
  }
  return out;
}

GaussianModelSpec wi_preset() {
  GaussianModelSpec spec;
  spec.zeta = {0.01, 0.01, 0.01, 0.01};
  return spec;
}

GaussianModelSpec si_preset(MixModel m) {
  GaussianModelSpec spec;
  if (m == MixModel::Mix2) {
    spec.zeta = {10.0, 100.0, 200.0, 100.0};
  } else {
    spec.zeta = {100.0, 400.0, 100.0, 200.0};
  }
  return spec;
}

}  // namespace bpddp
