// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bpddp/rng.hpp"

namespace bpddp {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

/// Base-measure hyperparameters: N(0, 1/s2) x IG(ig_shape, ig_rate).
struct NormalInverseGammaParams {
  double s2 = 0.1;
  double ig_shape = 0.5;
  double ig_rate = 0.5;
};

void validate(const BetaParams& p);
void validate(const GammaParams& p);
void validate(const NormalInverseGammaParams& p);

// ---- sampling -------------------------------------------------------------

double sample_beta(const BetaParams& p, RandomStream& rng);
double sample_gamma(const GammaParams& p, RandomStream& rng);
double sample_normal(double mean, double sd, RandomStream& rng);
/// shape/rate convention: mean = rate / (shape - 1) for shape > 1.
double sample_inverse_gamma(double shape, double rate, RandomStream& rng);

/// log of a Gamma(shape, 1) draw. Stable for shape << 1, where the linear
/// draw itself would underflow.
double sample_log_gamma(double shape, RandomStream& rng);

/// Covariance must be symmetric positive definite (Cholesky-based).
Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov, RandomStream& rng);

// ---- moments and chain laws ------------------------------------------------

/// E[Z^order] for Z ~ Beta(a,b): prod_{j<order} (a+j)/(a+b+j).
double beta_moment(const BetaParams& p, int order);

struct ProductBetaResult {
  bool compatible = false;
  BetaParams law;              // product law when compatible
  std::size_t violated_link = 0;  // 1-based link index, 0 when compatible
  double expected_shape = 0.0;    // shape the next factor needed
  double actual_shape = 0.0;
};

/// A product of independent Beta(a_i,b_i) factors is Beta(a_1, sum b_i)
/// when a_{i+1} = a_i + b_i along the chain (checked to 1e-12 absolute).
ProductBetaResult product_beta_law(std::span<const BetaParams> chain);

// ---- log densities ----------------------------------------------------------

double log_beta_fn(double a, double b);
/// Boundary values are the density limits: +/-inf depending on exponent sign.
double beta_logpdf(double x, const BetaParams& p);
double gamma_logpdf(double x, const GammaParams& p);
double normal_logpdf(double x, double mean, double var);
double inverse_gamma_logpdf(double x, double shape, double rate);

}  // namespace bpddp
