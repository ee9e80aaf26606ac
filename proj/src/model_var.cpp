// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/model_var.hpp"

#include <cmath>
#include <stdexcept>

#include "bpddp/errors.hpp"
#include "bpddp/slice_gibbs.hpp"

namespace bpddp {

void VarModelSpec::validate() const {
  if (p < 1) throw std::invalid_argument("lag order must be >= 1");
  if (!(s2 > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("s2 and lambda must be positive");
  for (double z : zeta)
    if (!(z > 0.0)) throw std::invalid_argument("zeta values must be positive");
}

std::vector<double> growth_transform(std::span<const double> levels,
                                     int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<int>(levels.size()) <= horizon)
    throw std::invalid_argument("series shorter than the growth horizon");
  std::vector<double> out;
  out.reserve(levels.size() - horizon);
  for (std::size_t t = horizon; t < levels.size(); ++t) {
    if (!(levels[t] > 0.0) || !(levels[t - horizon] > 0.0))
      throw std::domain_error("growth transform needs strictly positive levels");
    out.push_back(std::log(levels[t]) - std::log(levels[t - horizon]));
  }
  return out;
}

Eigen::VectorXd var_predictor(const std::array<std::vector<double>, 2>& y,
                              int p, int t) {
  Eigen::VectorXd z(2 * p);
  for (int lag = 1; lag <= p; ++lag) {
    z[lag - 1] = y[0][t - lag];
    z[p + lag - 1] = y[1][t - lag];
  }
  return z;
}

std::array<std::vector<double>, 2> residualize(
    const std::array<std::vector<double>, 2>& y, const VarCoefficients& ups,
    int p) {
  if (y[0].size() != y[1].size())
    throw std::invalid_argument("series lengths differ");
  if (ups.upsilon1.size() != 2 * p || ups.upsilon2.size() != 2 * p)
    throw std::invalid_argument("coefficient length does not match lag order");
  const int T = static_cast<int>(y[0].size());
  if (T <= p) throw std::invalid_argument("series shorter than lag order");
  std::array<std::vector<double>, 2> res;
  for (int t = p; t < T; ++t) {
    const Eigen::VectorXd z = var_predictor(y, p, t);
    res[0].push_back(y[0][t] - z.dot(ups.upsilon1));
    res[1].push_back(y[1][t] - z.dot(ups.upsilon2));
  }
  return res;
}

namespace {

struct WlsSystem {
  Eigen::MatrixXd prec;
  Eigen::VectorXd rhs;
};

WlsSystem assemble_wls(const std::array<std::vector<double>, 2>& y,
                       const std::array<std::vector<double>, 2>& mu,
                       const std::array<std::vector<double>, 2>& sigma2,
                       int p, int i) {
  const int T = static_cast<int>(y[0].size());
  WlsSystem sys{Eigen::MatrixXd::Zero(2 * p, 2 * p),
                Eigen::VectorXd::Zero(2 * p)};
  for (int t = p; t < T; ++t) {
    const Eigen::VectorXd z = var_predictor(y, p, t);
    const double inv_v = 1.0 / sigma2[i][t - p];
    sys.prec.noalias() += z * z.transpose() * inv_v;
    sys.rhs.noalias() += z * ((y[i][t] - mu[i][t - p]) * inv_v);
  }
  return sys;
}

void check_wls_inputs(const std::array<std::vector<double>, 2>& y,
                      const std::array<std::vector<double>, 2>& mu,
                      const std::array<std::vector<double>, 2>& sigma2,
                      int p) {
  const int T = static_cast<int>(y[0].size());
  const int n = T - p;
  if (n < 2 * p) throw std::invalid_argument("not enough usable time points");
  for (int i = 0; i < 2; ++i) {
    if (static_cast<int>(mu[i].size()) != n ||
        static_cast<int>(sigma2[i].size()) != n)
      throw std::invalid_argument("atom series length mismatch");
  }
}

}  // namespace

VarCoefficients var_posterior_mean(
    const std::array<std::vector<double>, 2>& y,
    const std::array<std::vector<double>, 2>& mu,
    const std::array<std::vector<double>, 2>& sigma2, int p) {
  check_wls_inputs(y, mu, sigma2, p);
  VarCoefficients out;
  for (int i = 0; i < 2; ++i) {
    const WlsSystem sys = assemble_wls(y, mu, sigma2, p, i);
    Eigen::LLT<Eigen::MatrixXd> llt(sys.prec);
    if (llt.info() != Eigen::Success)
      throw NumericError(
          "VAR design is rank deficient; cannot solve for coefficients "
          "(series " + std::to_string(i + 1) + ")");
    (i == 0 ? out.upsilon1 : out.upsilon2) = llt.solve(sys.rhs);
  }
  return out;
}

VarCoefficients update_var_coefficients(
    const std::array<std::vector<double>, 2>& y,
    const std::array<std::vector<double>, 2>& mu,
    const std::array<std::vector<double>, 2>& sigma2, int p,
    RandomStream& rng) {
  check_wls_inputs(y, mu, sigma2, p);
  VarCoefficients out;
  for (int i = 0; i < 2; ++i) {
    const WlsSystem sys = assemble_wls(y, mu, sigma2, p, i);
    Eigen::LLT<Eigen::MatrixXd> llt(sys.prec);
    if (llt.info() != Eigen::Success)
      throw NumericError(
          "VAR design is rank deficient; cannot draw coefficients (series " +
          std::to_string(i + 1) + ")");
    const Eigen::VectorXd mean = llt.solve(sys.rhs);
    Eigen::VectorXd zdraw(2 * p);
    for (int m = 0; m < 2 * p; ++m) zdraw[m] = sample_normal(0.0, 1.0, rng);
    // Covariance is prec^{-1}: solving L^T x = z gives cov prec^{-1}.
    const Eigen::VectorXd noise = llt.matrixU().solve(zdraw);
    (i == 0 ? out.upsilon1 : out.upsilon2) = mean + noise;
  }
  return out;
}

VarMixtureModel::VarMixtureModel(std::array<std::vector<double>, 2> growth,
                                 VarModelSpec spec)
    : data_(std::move(growth)), spec_(spec) {
  spec_.validate();
  if (data_[0].size() != data_[1].size())
    throw std::invalid_argument("series lengths differ");
  if (static_cast<int>(data_[0].size()) <= 3 * spec_.p)
    throw std::invalid_argument("series too short for the lag order");
  ups_.upsilon1 = Eigen::VectorXd::Zero(2 * spec_.p);
  ups_.upsilon2 = Eigen::VectorXd::Zero(2 * spec_.p);
  refresh_offsets();
}

void VarMixtureModel::refresh_offsets() {
  const int T = static_cast<int>(data_[0].size());
  for (int i = 0; i < 2; ++i) offsets_[i].assign(T - spec_.p, 0.0);
  for (int t = spec_.p; t < T; ++t) {
    const Eigen::VectorXd z = var_predictor(data_, spec_.p, t);
    offsets_[0][t - spec_.p] = z.dot(ups_.upsilon1);
    offsets_[1][t - spec_.p] = z.dot(ups_.upsilon2);
  }
}

void VarMixtureModel::set_coefficients(const VarCoefficients& ups) {
  if (ups.upsilon1.size() != 2 * spec_.p || ups.upsilon2.size() != 2 * spec_.p)
    throw std::invalid_argument("coefficient length does not match lag order");
  ups_ = ups;
  refresh_offsets();
}

void VarMixtureModel::update_auxiliary(const GibbsState& state,
                                       RandomStream& rng) {
  if (frozen_) return;
  const int n = obs_count(1);
  std::array<std::vector<double>, 2> mu, s2;
  for (int i = 0; i < 2; ++i) {
    mu[i].resize(n);
    s2[i].resize(n);
    for (int j = 0; j < n; ++j) {
      const int k = state.D[i][j];
      if (k > static_cast<int>(state.phi.size()))
        throw std::logic_error("allocation points past the atom table");
      mu[i][j] = state.phi[k - 1].mu;
      s2[i][j] = state.phi[k - 1].sigma2;
    }
  }
  ups_ = update_var_coefficients(data_, mu, s2, spec_.p, rng);
  refresh_offsets();
}

std::vector<double> VarMixtureModel::auxiliary_snapshot() const {
  std::vector<double> out;
  out.reserve(4 * spec_.p);
  for (int m = 0; m < 2 * spec_.p; ++m) out.push_back(ups_.upsilon1[m]);
  for (int m = 0; m < 2 * spec_.p; ++m) out.push_back(ups_.upsilon2[m]);
  return out;
}

double VarMixtureModel::predictive_offset(int i) const {
  // One step past the sample, using the last p observed growth values.
  const int T = static_cast<int>(data_[0].size());
  Eigen::VectorXd z(2 * spec_.p);
  for (int lag = 1; lag <= spec_.p; ++lag) {
    z[lag - 1] = data_[0][T - lag];
    z[spec_.p + lag - 1] = data_[1][T - lag];
  }
  return z.dot(i == 1 ? ups_.upsilon1 : ups_.upsilon2);
}

VarCoefficients two_regime_var_coefficients(int p) {
  VarCoefficients ups;
  ups.upsilon1 = Eigen::VectorXd::Zero(2 * p);
  ups.upsilon2 = Eigen::VectorXd::Zero(2 * p);
  ups.upsilon1[0] = 0.25;       // own lag 1
  ups.upsilon1[p] = 0.10;       // cross lag 1
  ups.upsilon2[0] = 0.10;       // cross lag 1
  ups.upsilon2[p] = 0.25;       // own lag 1
  if (p >= 2) {
    ups.upsilon1[1] = 0.10;
    ups.upsilon2[p + 1] = 0.10;
  }
  return ups;
}

std::array<std::vector<double>, 2> generate_two_regime_var(
    const TwoRegimeVarConfig& cfg, RandomStream& rng) {
  if (cfg.T <= 3 * cfg.p) throw std::invalid_argument("T too small");
  const VarCoefficients ups = two_regime_var_coefficients(cfg.p);
  std::array<std::vector<double>, 2> y;
  auto regime_mu = [&](int t) {
    return (t / cfg.block) % 2 == 0 ? cfg.mu_low : cfg.mu_high;
  };
  auto regime_s2 = [&](int t) {
    return (t / cfg.block) % 2 == 0 ? cfg.sigma2_low : cfg.sigma2_high;
  };
  for (int t = 0; t < cfg.T; ++t) {
    for (int i = 0; i < 2; ++i) {
      double mean = regime_mu(t);
      if (t >= cfg.p) {
        const Eigen::VectorXd z = var_predictor(y, cfg.p, t);
        mean += z.dot(i == 0 ? ups.upsilon1 : ups.upsilon2);
      }
      y[i].push_back(
          sample_normal(mean, std::sqrt(regime_s2(t)), rng));
    }
  }
  return y;
}

}  // namespace bpddp
