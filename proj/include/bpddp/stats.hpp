// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bpddp/distributions.hpp"

namespace bpddp {

/// sup-norm distance between the sample ECDF and a reference CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Critical value c(level)/sqrt(n) of the one-sample KS test.
double ks_critical(double level, std::size_t n);
/// Two-sample critical value c(level) * sqrt((n+m)/(n*m)).
double ks_two_sample_critical(double level, std::size_t n, std::size_t m);

double beta_cdf(double x, const BetaParams& p);
double normal_cdf(double x);
double gamma_cdf(double x, const GammaParams& p);

double pearson_correlation(std::span<const double> x,
                           std::span<const double> y);

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
  double se() const;
};
MeanVar mean_var(std::span<const double> x);

/// Chi-square goodness-of-fit p-value for observed counts vs expected
/// probabilities (upper tail).
double chi2_gof_pvalue(std::span<const long long> counts,
                       std::span<const double> probs);

}  // namespace bpddp
