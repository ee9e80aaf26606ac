// Apache License, Version 2.0, refer to LICENSE.txt

#ifdef BPDDP_HAVE_AVX2

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "kernels_impl.hpp"
#include "exp_core.hpp"

namespace bpddp::simd::detail {

namespace {

inline __m256d exp_core_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(kExpLog2e);
  const __m256d half = _mm256_set1_pd(0.5);

  const __m256d n =
      _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(x, log2e), half));
  __m256d r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kExpC1), x);
  r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kExpC2), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(kExpP0);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(kExpP1));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(kExpP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(kExpQ0);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ2));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ3));
  const __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  const __m256d y =
      _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scaled = _mm256_mul_pd(y, _mm256_castsi256_pd(bits));

  const __m256d over = _mm256_cmp_pd(x, _mm256_set1_pd(kExpOverflow), _CMP_GT_OQ);
  const __m256d under = _mm256_cmp_pd(x, _mm256_set1_pd(kExpUnderflow), _CMP_LT_OQ);
  const __m256d nan_mask = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

  __m256d out = scaled;
  out = _mm256_blendv_pd(out, _mm256_set1_pd(HUGE_VAL), over);
  out = _mm256_blendv_pd(out, _mm256_setzero_pd(), under);
  out = _mm256_blendv_pd(out, x, nan_mask);
  return out;
}

}  // namespace

void exp_batch_avx2(const double* x, double* out, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; i += 4) {
    _mm256_storeu_pd(out + i, exp_core_pd(_mm256_loadu_pd(x + i)));
  }
  for (std::size_t i = n4; i < n; ++i) out[i] = exp_core_scalar(x[i]);
}

void gauss_logpdf_batch_avx2(double y, const double* mu, const double* nhiv,
                             const double* log_norm, double* out,
                             std::size_t n) {
  const __m256d vy = _mm256_set1_pd(y);
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(vy, _mm256_loadu_pd(mu + i));
    const __m256d d2 = _mm256_mul_pd(d, d);
    const __m256d r = _mm256_fmadd_pd(d2, _mm256_loadu_pd(nhiv + i),
                                      _mm256_loadu_pd(log_norm + i));
    _mm256_storeu_pd(out + i, r);
  }
  gauss_logpdf_batch_scalar(y, mu + n4, nhiv + n4, log_norm + n4, out + n4,
                            n - n4);
}

double kde_gauss_sum_avx2(const double* s, std::size_t n, double y,
                          double inv_h) {
  const __m256d vy = _mm256_set1_pd(y);
  const __m256d vih = _mm256_set1_pd(inv_h);
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d t =
        _mm256_mul_pd(_mm256_sub_pd(vy, _mm256_loadu_pd(s + i)), vih);
    const __m256d z = _mm256_mul_pd(t, t);
    acc = _mm256_add_pd(acc, exp_core_pd(_mm256_mul_pd(mhalf, z)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) {
    const double t = (y - s[i]) * inv_h;
    const double z = t * t;
    lane[i - n4] += exp_core_scalar(-0.5 * z);
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double masked_sum_avx2(const double* w, const std::uint8_t* mask,
                       std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; i += 4) {
    std::uint32_t m4;
    std::memcpy(&m4, mask + i, 4);
    const __m256i mb =
        _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(m4)));
    const __m256d zero_mask = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(mb, _mm256_setzero_si256()));
    const __m256d vals =
        _mm256_andnot_pd(zero_mask, _mm256_loadu_pd(w + i));
    acc = _mm256_add_pd(acc, vals);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) {
    lane[i - n4] += mask[i] ? w[i] : 0.0;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void coclustering_accumulate_avx2(const std::int32_t* a, std::size_t rows,
                                  const std::int32_t* b, std::size_t cols,
                                  double* accum) {
  const std::size_t n4 = cols & ~std::size_t(3);
  for (std::size_t s = 0; s < rows; ++s) {
    const __m128i as = _mm_set1_epi32(a[s]);
    double* row = accum + s * cols;
    for (std::size_t t = 0; t < n4; t += 4) {
      const __m128i lt =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + t));
      const __m128i eq = _mm_cmpeq_epi32(lt, as);
      const __m128i ones = _mm_and_si128(eq, _mm_set1_epi32(1));
      const __m256d inc = _mm256_cvtepi32_pd(ones);
      _mm256_storeu_pd(row + t,
                       _mm256_add_pd(_mm256_loadu_pd(row + t), inc));
    }
    for (std::size_t t = n4; t < cols; ++t) {
      if (b[t] == a[s]) row[t] += 1.0;
    }
  }
}

}  // namespace bpddp::simd::detail

#endif  // BPDDP_HAVE_AVX2
