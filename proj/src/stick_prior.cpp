// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/stick_prior.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bpddp {

const char* scheme_name(Scheme s) { return s == Scheme::H1 ? "H1" : "H2"; }

Scheme scheme_from_name(const std::string& name) {
  if (name == "H1" || name == "h1") return Scheme::H1;
  if (name == "H2" || name == "h2") return Scheme::H2;
  throw std::invalid_argument("unknown scheme: " + name);
}

void StickConstruction::validate() const {
  if (r < 2) throw std::invalid_argument("need at least two series");
  const std::size_t want = scheme == Scheme::H1 ? 2u : static_cast<std::size_t>(r);
  if (alphas.size() != want)
    throw std::invalid_argument("alpha count does not match scheme/r");
  for (double a : alphas)
    if (!(a > 0.0)) throw std::invalid_argument("alphas must be positive");
  if (!(discount >= 0.0) || !(discount < 1.0))
    throw std::invalid_argument("discount must lie in [0,1)");
}

int StickConstruction::factor_count() const {
  return scheme == Scheme::H1 ? r + 1 : r;
}

BetaParams StickConstruction::factor_law(int m, int k) const {
  if (m < 0 || m >= factor_count()) throw std::invalid_argument("bad factor index");
  if (k < 1) throw std::invalid_argument("stick index must be >= 1");
  const double l = discount;
  if (scheme == Scheme::H1) {
    // V_0k ~ Beta(1-l+a1, a2+lk), V_ik ~ Beta(1-l, a1), i = 1..r
    if (m == 0) return {1.0 - l + alphas[0], alphas[1] + l * k};
    return {1.0 - l, alphas[0]};
  }
  // H2: V_0k ~ Beta(1-l, a1+lk),
  //     V_jk ~ Beta(1+a1+...+aj+l(k-1), a_{j+1}), j = 1..r-1
  if (m == 0) return {1.0 - l, alphas[0] + l * k};
  double cum = 0.0;
  for (int j = 0; j < m; ++j) cum += alphas[j];
  return {1.0 + cum + l * (k - 1), alphas[m]};
}

std::vector<int> StickConstruction::factors_of_series(int i) const {
  if (i < 1 || i > r) throw std::invalid_argument("series index out of range");
  std::vector<int> idx;
  if (scheme == Scheme::H1) {
    idx = {0, i};
  } else {
    // S_i = V_0 V_1 ... V_{r-i}
    idx.resize(r - i + 1);
    std::iota(idx.begin(), idx.end(), 0);
  }
  return idx;
}

double StickConstruction::marginal_precision(int i) const {
  if (scheme == Scheme::H1) return alphas[0] + alphas[1];
  double theta = 0.0;
  for (int m = 0; m < r - i + 1; ++m) theta += alphas[m];
  return theta;
}

BetaParams StickConstruction::marginal_law(int i, int k) const {
  if (i < 1 || i > r) throw std::invalid_argument("series index out of range");
  if (k < 1) throw std::invalid_argument("stick index must be >= 1");
  return {1.0 - discount, marginal_precision(i) + discount * k};
}

AtomScheme AtomScheme::common(std::function<double(RandomStream&)> h0) {
  AtomScheme s;
  s.mode = AtomMode::Common;
  s.base = std::move(h0);
  return s;
}

std::vector<double> AtomScheme::sample(int r, RandomStream& rng) const {
  std::vector<double> out(r);
  switch (mode) {
    case AtomMode::Common: {
      if (!base) throw std::invalid_argument("common atoms need a base sampler");
      const double v = base(rng);
      for (double& x : out) x = v;
      break;
    }
    case AtomMode::Product: {
      if (per_series.size() != static_cast<std::size_t>(r))
        throw std::invalid_argument("product atoms need one sampler per series");
      for (int i = 0; i < r; ++i) out[i] = per_series[i](rng);
      break;
    }
    case AtomMode::Anova: {
      if (!base || !offset)
        throw std::invalid_argument("anova atoms need level and offset samplers");
      const double level = base(rng);
      for (int i = 0; i < r; ++i) out[i] = level + offset(rng);
      break;
    }
  }
  return out;
}

std::vector<double> sample_stick_vector(const StickConstruction& c, int k,
                                        RandomStream& rng) {
  c.validate();
  if (k < 1) throw std::invalid_argument("stick index must be >= 1");
  const int nf = c.factor_count();
  std::vector<double> v(nf);
  for (int m = 0; m < nf; ++m) v[m] = sample_beta(c.factor_law(m, k), rng);

  std::vector<double> s(c.r);
  if (c.scheme == Scheme::H1) {
    for (int i = 1; i <= c.r; ++i) s[i - 1] = v[0] * v[i];
  } else {
    // Suffix products: S_r = V_0, S_{r-1} = V_0 V_1, ..., S_1 = V_0...V_{r-1}.
    double prod = v[0];
    s[c.r - 1] = prod;
    for (int i = c.r - 1; i >= 1; --i) {
      prod *= v[c.r - i];
      s[i - 1] = prod;
    }
  }
  return s;
}

StickMoments stick_moments(const StickConstruction& c, int i, int j) {
  c.validate();
  if (i == j) throw std::invalid_argument("need two distinct series");
  if (c.discount != 0.0)
    throw std::invalid_argument("closed moments implemented for discount 0 only");
  if (i > j) std::swap(i, j);

  const auto fi = c.factors_of_series(i);
  const auto fj = c.factors_of_series(j);

  auto first_moment = [&](const std::vector<int>& f) {
    double m = 1.0;
    for (int idx : f) m *= beta_moment(c.factor_law(idx, 1), 1);
    return m;
  };
  auto second_moment = [&](const std::vector<int>& f) {
    double m = 1.0;
    for (int idx : f) m *= beta_moment(c.factor_law(idx, 1), 2);
    return m;
  };

  StickMoments mom{};
  mom.e_i = first_moment(fi);
  mom.e_j = first_moment(fj);
  mom.e2_i = second_moment(fi);
  mom.e2_j = second_moment(fj);

  // E[S_i S_j]: shared factors contribute E[V^2], the rest E[V].
  double eij = 1.0;
  for (int m = 0; m < c.factor_count(); ++m) {
    const bool in_i = std::find(fi.begin(), fi.end(), m) != fi.end();
    const bool in_j = std::find(fj.begin(), fj.end(), m) != fj.end();
    if (in_i && in_j)
      eij *= beta_moment(c.factor_law(m, 1), 2);
    else if (in_i || in_j)
      eij *= beta_moment(c.factor_law(m, 1), 1);
  }
  mom.e_ij = eij;
  return mom;
}

double stick_correlation(const StickConstruction& c, int i, int j) {
  const StickMoments m = stick_moments(c, i, j);
  const double cov = m.e_ij - m.e_i * m.e_j;
  const double var_i = m.e2_i - m.e_i * m.e_i;
  const double var_j = m.e2_j - m.e_j * m.e_j;
  return cov / std::sqrt(var_i * var_j);
}

double measure_correlation(const StickConstruction& c, int i, int j) {
  const StickMoments m = stick_moments(c, i, j);
  const double front = m.e_ij / (m.e_i + m.e_j - m.e_ij);
  const double tail = std::sqrt((2.0 * m.e_i - m.e2_i) * (2.0 * m.e_j - m.e2_j) /
                                (m.e2_i * m.e2_j));
  return front * tail;
}

TruncatedMeasureVector sample_truncated_measures(const StickConstruction& c,
                                                 const AtomScheme& atoms,
                                                 int K, RandomStream& rng) {
  c.validate();
  if (K < 1) throw std::invalid_argument("truncation level must be >= 1");
  TruncatedMeasureVector out;
  out.K = K;
  out.r = c.r;
  out.sticks.resize(static_cast<std::size_t>(K) * c.r);
  out.weights.resize(static_cast<std::size_t>(K) * c.r);
  out.atoms.resize(static_cast<std::size_t>(K) * c.r);
  out.remainder.assign(c.r, 1.0);
  out.factor_params.resize(K);

  for (int k = 1; k <= K; ++k) {
    const auto s = sample_stick_vector(c, k, rng);
    const auto a = atoms.sample(c.r, rng);
    out.factor_params[k - 1].resize(c.factor_count());
    for (int m = 0; m < c.factor_count(); ++m)
      out.factor_params[k - 1][m] = c.factor_law(m, k);
    for (int i = 0; i < c.r; ++i) {
      const std::size_t pos = out.idx(k, i + 1);
      out.sticks[pos] = s[i];
      out.weights[pos] = s[i] * out.remainder[i];
      out.atoms[pos] = a[i];
      out.remainder[i] *= 1.0 - s[i];
    }
  }
  return out;
}

}  // namespace bpddp
