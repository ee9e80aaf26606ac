// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <cstdint>

// Internal kernel entry points, one set per instruction level. The public
// dispatching API lives in bpddp/simd/kernels.hpp.

namespace bpddp::simd::detail {

double exp_core_scalar(double x);
void exp_batch_scalar(const double* x, double* out, std::size_t n);
void gauss_logpdf_batch_scalar(double y, const double* mu, const double* nhiv,
                               const double* log_norm, double* out,
                               std::size_t n);
double kde_gauss_sum_scalar(const double* s, std::size_t n, double y,
                            double inv_h);
double masked_sum_scalar(const double* w, const std::uint8_t* mask,
                         std::size_t n);
void coclustering_accumulate_scalar(const std::int32_t* a, std::size_t rows,
                                    const std::int32_t* b, std::size_t cols,
                                    double* accum);

#ifdef BPDDP_HAVE_AVX2
void exp_batch_avx2(const double* x, double* out, std::size_t n);
void gauss_logpdf_batch_avx2(double y, const double* mu, const double* nhiv,
                             const double* log_norm, double* out,
                             std::size_t n);
double kde_gauss_sum_avx2(const double* s, std::size_t n, double y,
                          double inv_h);
double masked_sum_avx2(const double* w, const std::uint8_t* mask,
                       std::size_t n);
void coclustering_accumulate_avx2(const std::int32_t* a, std::size_t rows,
                                  const std::int32_t* b, std::size_t cols,
                                  double* accum);
#endif

}  // namespace bpddp::simd::detail
