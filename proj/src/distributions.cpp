// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bpddp/errors.hpp"

namespace bpddp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Keep stick values usable in logs: never exactly 0 or 1.
double clamp_open_unit(double x) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}

// Marsaglia-Tsang (2000) for shape >= 1; the recursive boost handles shape < 1
// in log space so tiny shapes do not underflow.
double mt_gamma_unit_rate(double shape, RandomStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(0.0, 1.0, rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

void validate(const BetaParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0))
    throw std::invalid_argument("beta shapes must be positive");
}

void validate(const GammaParams& p) {
  if (!(p.shape > 0.0) || !(p.rate > 0.0))
    throw std::invalid_argument("gamma shape and rate must be positive");
}

void validate(const NormalInverseGammaParams& p) {
  if (!(p.s2 > 0.0) || !(p.ig_shape > 0.0) || !(p.ig_rate > 0.0))
    throw std::invalid_argument("normal-inverse-gamma hyperparameters must be positive");
}

double sample_log_gamma(double shape, RandomStream& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (shape >= 1.0) return std::log(mt_gamma_unit_rate(shape, rng));
  // Gamma(a) = Gamma(a+1) * U^{1/a}, applied in log space.
  return std::log(mt_gamma_unit_rate(shape + 1.0, rng)) +
         std::log(rng.uniform()) / shape;
}

double sample_gamma(const GammaParams& p, RandomStream& rng) {
  validate(p);
  if (p.shape >= 1.0) return mt_gamma_unit_rate(p.shape, rng) / p.rate;
  return std::exp(sample_log_gamma(p.shape, rng) - std::log(p.rate));
}

double sample_beta(const BetaParams& p, RandomStream& rng) {
  validate(p);
  // Ratio of two gamma draws, combined in log space so that small shapes
  // (discounts near 1, diffuse hyperpriors) stay exact.
  const double lx = sample_log_gamma(p.a, rng);
  const double ly = sample_log_gamma(p.b, rng);
  const double diff = ly - lx;  // beta = 1 / (1 + exp(diff))
  double value;
  if (diff > 0.0) {
    const double e = std::exp(-diff);
    value = e / (1.0 + e);
  } else {
    value = 1.0 / (1.0 + std::exp(diff));
  }
  return clamp_open_unit(value);
}

double sample_normal(double mean, double sd, RandomStream& rng) {
  // Polar method; one value per call keeps the stream state minimal.
  double u, v, s;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return mean + sd * u * std::sqrt(-2.0 * std::log(s) / s);
}

double sample_inverse_gamma(double shape, double rate, RandomStream& rng) {
  return 1.0 / sample_gamma({shape, rate}, rng);
}

Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov, RandomStream& rng) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::invalid_argument("mvnormal dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericError("mvnormal covariance is not positive definite");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(0.0, 1.0, rng);
  return mean + llt.matrixL() * z;
}

double beta_moment(const BetaParams& p, int order) {
  validate(p);
  if (order < 1) throw std::invalid_argument("moment order must be >= 1");
  double m = 1.0;
  for (int j = 0; j < order; ++j) m *= (p.a + j) / (p.a + p.b + j);
  return m;
}

ProductBetaResult product_beta_law(std::span<const BetaParams> chain) {
  if (chain.empty()) throw std::invalid_argument("empty beta chain");
  constexpr double tol = 1e-12;
  ProductBetaResult res;
  double b_sum = chain[0].b;
  validate(chain[0]);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    validate(chain[i]);
    const double expected = chain[i - 1].a + chain[i - 1].b;
    if (std::abs(chain[i].a - expected) > tol) {
      res.compatible = false;
      res.violated_link = i;  // link between factor i-1 and factor i, 1-based
      res.expected_shape = expected;
      res.actual_shape = chain[i].a;
      return res;
    }
    b_sum += chain[i].b;
  }
  res.compatible = true;
  res.law = {chain[0].a, b_sum};
  return res;
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_logpdf(double x, const BetaParams& p) {
  validate(p);
  if (x < 0.0 || x > 1.0) return -kInf;
  const double ea = p.a - 1.0;
  const double eb = p.b - 1.0;
  if (x == 0.0) return ea > 0.0 ? -kInf : (ea == 0.0 ? -log_beta_fn(p.a, p.b) : kInf);
  if (x == 1.0) return eb > 0.0 ? -kInf : (eb == 0.0 ? -log_beta_fn(p.a, p.b) : kInf);
  return ea * std::log(x) + eb * std::log1p(-x) - log_beta_fn(p.a, p.b);
}

double gamma_logpdf(double x, const GammaParams& p) {
  validate(p);
  if (x <= 0.0) return -kInf;
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) +
         (p.shape - 1.0) * std::log(x) - p.rate * x;
}

double normal_logpdf(double x, double mean, double var) {
  if (!(var > 0.0)) throw std::invalid_argument("normal variance must be positive");
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * d * d / var;
}

double inverse_gamma_logpdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("inverse-gamma parameters must be positive");
  if (x <= 0.0) return -kInf;
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}

}  // namespace bpddp
