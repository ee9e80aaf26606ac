// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/mixture_model.hpp"

#include <cmath>

#include "bpddp/slice_gibbs.hpp"

namespace bpddp {

void ConditionallyGaussianModel::update_auxiliary(const GibbsState&,
                                                  RandomStream&) {}

double ConditionallyGaussianModel::predictive_offset(int) const { return 0.0; }

Atom gaussian_atom_prior_draw(const NormalInverseGammaParams& base,
                              RandomStream& rng) {
  Atom a;
  a.mu = sample_normal(0.0, 1.0 / std::sqrt(base.s2), rng);
  a.sigma2 = sample_inverse_gamma(base.ig_shape, base.ig_rate, rng);
  return a;
}

Atom gaussian_conjugate_step(std::span<const double> values,
                             const Atom& current,
                             const NormalInverseGammaParams& base,
                             RandomStream& rng) {
  validate(base);
  const double count = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;

  // mu | sigma2: normal with precision s2 + A/sigma2.
  const double prec = base.s2 + count / current.sigma2;
  const double mean = (sum / current.sigma2) / prec;
  Atom next;
  next.mu = sample_normal(mean, 1.0 / std::sqrt(prec), rng);

  // sigma2 | mu: IG(lambda + A/2, lambda + sum (v - mu)^2 / 2).
  double ssq = 0.0;
  for (double v : values) {
    const double d = v - next.mu;
    ssq += d * d;
  }
  next.sigma2 = sample_inverse_gamma(base.ig_shape + 0.5 * count,
                                     base.ig_rate + 0.5 * ssq, rng);
  return next;
}

}  // namespace bpddp
