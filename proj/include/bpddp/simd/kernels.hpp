// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>

namespace bpddp::simd {

enum class Level { scalar, avx2 };

/// Best level this CPU supports.
Level detected();
/// Level currently dispatched to.
Level active();
/// Override dispatch (throws std::invalid_argument if unsupported here).
/// Not thread safe; call before spawning chains.
void force(Level level);
const char* name(Level level);

// The scalar implementations are the reference semantics; vector variants
// must produce bit-identical results (same polynomial, same fma placement,
// same lane-wise accumulation order). Equivalence is enforced by tests.

/// out[i] = exp(x[i]). Inputs below -708.396 flush to 0, above 709.436 to inf.
void exp_batch(std::span<const double> x, std::span<double> out);

/// out[k] = log_norm[k] + neg_half_inv_var[k] * (y - mu[k])^2
void gauss_logpdf_batch(double y, std::span<const double> mu,
                        std::span<const double> neg_half_inv_var,
                        std::span<const double> log_norm,
                        std::span<double> out);

/// sum_i exp(-((y - samples[i]) * inv_h)^2 / 2), 4-lane accumulation order.
double kde_gauss_sum(std::span<const double> samples, double y, double inv_h);

/// sum_i w[i] where mask[i] != 0, 4-lane accumulation order.
double masked_sum(std::span<const double> w, std::span<const std::uint8_t> mask);

/// accum[s*cols + t] += 1 whenever a[s] == b[t]; accum is a.size() x b.size().
/// Pass the same span twice for a within-series co-clustering matrix.
void coclustering_accumulate(std::span<const std::int32_t> a,
                             std::span<const std::int32_t> b,
                             std::span<double> accum);

}  // namespace bpddp::simd
