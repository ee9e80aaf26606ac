// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

// Shared constants for the elementwise exp kernel. Scalar and AVX2 variants
// evaluate exactly the same Cody-Waite reduction and rational approximation
// so their results agree bit for bit.

namespace bpddp::simd::detail {

inline constexpr double kExpLog2e = 1.4426950408889634073599;
inline constexpr double kExpC1 = 6.93145751953125e-1;
inline constexpr double kExpC2 = 1.42860682030941723212e-6;

inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;

inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;

inline constexpr double kExpUnderflow = -708.396418532264106224;
inline constexpr double kExpOverflow = 709.436;

}  // namespace bpddp::simd::detail
