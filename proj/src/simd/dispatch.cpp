// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/simd/kernels.hpp"

#include <stdexcept>

#include "kernels_impl.hpp"

namespace bpddp::simd {

namespace {

using detail::coclustering_accumulate_scalar;
using detail::exp_batch_scalar;
using detail::gauss_logpdf_batch_scalar;
using detail::kde_gauss_sum_scalar;
using detail::masked_sum_scalar;

struct KernelTable {
  void (*exp_batch)(const double*, double*, std::size_t);
  void (*gauss_logpdf)(double, const double*, const double*, const double*,
                       double*, std::size_t);
  double (*kde_sum)(const double*, std::size_t, double, double);
  double (*masked_sum)(const double*, const std::uint8_t*, std::size_t);
  void (*cocluster)(const std::int32_t*, std::size_t, const std::int32_t*,
                    std::size_t, double*);
};

constexpr KernelTable kScalarTable = {
    exp_batch_scalar, gauss_logpdf_batch_scalar, kde_gauss_sum_scalar,
    masked_sum_scalar, coclustering_accumulate_scalar};

#ifdef BPDDP_HAVE_AVX2
constexpr KernelTable kAvx2Table = {
    detail::exp_batch_avx2, detail::gauss_logpdf_batch_avx2,
    detail::kde_gauss_sum_avx2, detail::masked_sum_avx2,
    detail::coclustering_accumulate_avx2};
#endif

bool cpu_has_avx2() {
#if defined(BPDDP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level g_active = cpu_has_avx2() ? Level::avx2 : Level::scalar;

const KernelTable& table() {
#ifdef BPDDP_HAVE_AVX2
  if (g_active == Level::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

}  // namespace

Level detected() { return cpu_has_avx2() ? Level::avx2 : Level::scalar; }

Level active() { return g_active; }

void force(Level level) {
  if (level == Level::avx2 && detected() != Level::avx2)
    throw std::invalid_argument("avx2 kernels not available on this host/build");
  g_active = level;
}

const char* name(Level level) {
  return level == Level::avx2 ? "avx2" : "scalar";
}

void exp_batch(std::span<const double> x, std::span<double> out) {
  table().exp_batch(x.data(), out.data(), x.size());
}

void gauss_logpdf_batch(double y, std::span<const double> mu,
                        std::span<const double> neg_half_inv_var,
                        std::span<const double> log_norm,
                        std::span<double> out) {
  table().gauss_logpdf(y, mu.data(), neg_half_inv_var.data(), log_norm.data(),
                       out.data(), mu.size());
}

double kde_gauss_sum(std::span<const double> samples, double y, double inv_h) {
  return table().kde_sum(samples.data(), samples.size(), y, inv_h);
}

double masked_sum(std::span<const double> w,
                  std::span<const std::uint8_t> mask) {
  return table().masked_sum(w.data(), mask.data(), w.size());
}

void coclustering_accumulate(std::span<const std::int32_t> a,
                             std::span<const std::int32_t> b,
                             std::span<double> accum) {
  table().cocluster(a.data(), a.size(), b.data(), b.size(), accum.data());
}

}  // namespace bpddp::simd
