// Apache License, Version 2.0, refer to LICENSE.txt

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "kernels_impl.hpp"
#include "exp_core.hpp"

namespace bpddp::simd::detail {

double exp_core_scalar(double x) {
  if (std::isnan(x)) return x;
  if (x > kExpOverflow) return std::numeric_limits<double>::infinity();
  if (x < kExpUnderflow) return 0.0;

  const double n = std::floor(x * kExpLog2e + 0.5);
  double r = std::fma(-n, kExpC1, x);
  r = std::fma(-n, kExpC2, r);

  const double rr = r * r;
  double p = kExpP0;
  p = std::fma(p, rr, kExpP1);
  p = std::fma(p, rr, kExpP2);
  p *= r;
  double q = kExpQ0;
  q = std::fma(q, rr, kExpQ1);
  q = std::fma(q, rr, kExpQ2);
  q = std::fma(q, rr, kExpQ3);
  const double e = p / (q - p);
  const double y = 1.0 + 2.0 * e;

  const auto ni = static_cast<std::int64_t>(n);
  const double scale = std::bit_cast<double>((ni + 1023) << 52);
  return y * scale;
}

void exp_batch_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = exp_core_scalar(x[i]);
}

void gauss_logpdf_batch_scalar(double y, const double* mu, const double* nhiv,
                               const double* log_norm, double* out,
                               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y - mu[i];
    out[i] = std::fma(d * d, nhiv[i], log_norm[i]);
  }
}

double kde_gauss_sum_scalar(const double* s, std::size_t n, double y,
                            double inv_h) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; ++i) {
    const double t = (y - s[i]) * inv_h;
    const double z = t * t;
    lane[i & 3] += exp_core_scalar(-0.5 * z);
  }
  for (std::size_t i = n4; i < n; ++i) {
    const double t = (y - s[i]) * inv_h;
    const double z = t * t;
    lane[i - n4] += exp_core_scalar(-0.5 * z);
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double masked_sum_scalar(const double* w, const std::uint8_t* mask,
                         std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; ++i) {
    lane[i & 3] += mask[i] ? w[i] : 0.0;
  }
  for (std::size_t i = n4; i < n; ++i) {
    lane[i - n4] += mask[i] ? w[i] : 0.0;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void coclustering_accumulate_scalar(const std::int32_t* a, std::size_t rows,
                                    const std::int32_t* b, std::size_t cols,
                                    double* accum) {
  for (std::size_t s = 0; s < rows; ++s) {
    const std::int32_t as = a[s];
    double* row = accum + s * cols;
    for (std::size_t t = 0; t < cols; ++t) {
      if (b[t] == as) row[t] += 1.0;
    }
  }
}

}  // namespace bpddp::simd::detail
