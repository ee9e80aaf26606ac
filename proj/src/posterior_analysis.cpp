// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/posterior_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "bpddp/errors.hpp"
#include "bpddp/simd/kernels.hpp"
#include "bpddp/stats.hpp"

namespace bpddp {

namespace {

std::vector<std::int32_t> to_labels(const std::vector<int>& d) {
  return std::vector<std::int32_t>(d.begin(), d.end());
}

int parse_meta_int(const ChainArchive& archive, const std::string& key,
                   int fallback) {
  const std::string v = archive.meta_value(key);
  return v.empty() ? fallback : std::stoi(v);
}

}  // namespace

PairwiseMatrix pairwise_matrix(const ChainArchive& archive, int i, int j) {
  if (archive.records.empty()) throw std::invalid_argument("empty archive");
  if (i != j && !archive.common_atoms())
    throw std::invalid_argument(
        "cross-series pairwise matrix requires a common-atoms model");

  PairwiseMatrix pm;
  pm.rows = static_cast<int>(archive.records[0].allocations[i - 1].size());
  pm.cols = static_cast<int>(archive.records[0].allocations[j - 1].size());
  pm.samples = static_cast<int>(archive.records.size());
  pm.p.assign(static_cast<std::size_t>(pm.rows) * pm.cols, 0.0);

  for (const auto& rec : archive.records) {
    const auto a = to_labels(rec.allocations[i - 1]);
    const auto b = to_labels(rec.allocations[j - 1]);
    simd::coclustering_accumulate(a, b, pm.p);
  }
  const double inv = 1.0 / pm.samples;
  for (double& v : pm.p) v *= inv;
  return pm;
}

LsClustering least_squares_clustering(const ChainArchive& archive, int i) {
  const PairwiseMatrix pm = pairwise_matrix(archive, i, i);
  const int T = pm.rows;

  LsClustering best;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (std::size_t l = 0; l < archive.records.size(); ++l) {
    const auto& d = archive.records[l].allocations[i - 1];
    double loss = 0.0;
    for (int s = 0; s < T; ++s) {
      for (int t = 0; t < T; ++t) {
        const double ind = d[s] == d[t] ? 1.0 : 0.0;
        const double diff = ind - pm.at(s, t);
        loss += diff * diff;
      }
    }
    if (loss < best_loss) {
      best_loss = loss;
      best_idx = static_cast<int>(l);
    }
  }
  best.record_index = best_idx;
  best.sweep = archive.records[best_idx].sweep;
  best.loss = best_loss;
  best.allocation = archive.records[best_idx].allocations[i - 1];
  best.atoms = archive.records[best_idx].atoms;
  return best;
}

std::vector<std::array<int, 2>> cluster_count_trace(const ChainArchive& archive) {
  std::vector<std::array<int, 2>> out;
  out.reserve(archive.traces.size());
  for (const auto& t : archive.traces) out.push_back(t.clusters);
  return out;
}

std::vector<std::pair<int, long long>> cluster_count_histogram(
    const ChainArchive& archive, int i) {
  const int burn_in = parse_meta_int(archive, "burn_in", 0);
  std::map<int, long long> hist;
  for (const auto& t : archive.traces) {
    if (t.sweep > burn_in) hist[t.clusters[i - 1]] += 1;
  }
  return {hist.begin(), hist.end()};
}

int cluster_count_mode(const ChainArchive& archive, int i) {
  const auto hist = cluster_count_histogram(archive, i);
  if (hist.empty()) throw std::invalid_argument("no post-burn-in sweeps");
  int mode = hist.front().first;
  long long best = hist.front().second;
  for (const auto& [k, c] : hist) {
    if (c > best) {
      best = c;
      mode = k;
    }
  }
  return mode;
}

std::vector<double> ergodic_average(std::span<const double> trace) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  std::vector<double> out(trace.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    sum += trace[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

double DensityGrid::integral(int series) const {
  const auto& f = series == 1 ? f1 : f2;
  double acc = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i)
    acc += 0.5 * (f[i] + f[i - 1]) * (y[i] - y[i - 1]);
  return acc;
}

double silverman_bandwidth(std::span<const double> sample) {
  if (sample.size() < 2) throw std::invalid_argument("sample too small");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const MeanVar mv = mean_var(sample);
  const double sd = std::sqrt(mv.var);
  const std::size_t n = sorted.size();
  const double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
  const double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
  const double iqr = q3 - q1;
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityGrid density_grid_from_samples(std::span<const double> s1,
                                      std::span<const double> s2, int points) {
  if (points < 2) throw std::invalid_argument("need at least two grid points");
  const double h1 = silverman_bandwidth(s1);
  const double h2 = silverman_bandwidth(s2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : s1) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : s2) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double pad = 3.0 * std::max(h1, h2);
  lo -= pad;
  hi += pad;

  DensityGrid grid;
  grid.y.resize(points);
  grid.f1.resize(points);
  grid.f2.resize(points);
  const double step = (hi - lo) / (points - 1);
  const double c1 = 1.0 / (s1.size() * h1 * std::sqrt(2.0 * M_PI));
  const double c2 = 1.0 / (s2.size() * h2 * std::sqrt(2.0 * M_PI));
  for (int g = 0; g < points; ++g) {
    const double yv = lo + g * step;
    grid.y[g] = yv;
    grid.f1[g] = c1 * simd::kde_gauss_sum(s1, yv, 1.0 / h1);
    grid.f2[g] = c2 * simd::kde_gauss_sum(s2, yv, 1.0 / h2);
  }
  return grid;
}

DensityGrid predictive_density_grid(const ChainArchive& archive, int points) {
  if (archive.predictive.empty())
    throw std::invalid_argument("archive holds no predictive draws");
  std::vector<double> s1, s2;
  s1.reserve(archive.predictive.size());
  s2.reserve(archive.predictive.size());
  for (const auto& p : archive.predictive) {
    s1.push_back(p.y1);
    s2.push_back(p.y2);
  }
  return density_grid_from_samples(s1, s2, points);
}

std::vector<double> local_maxima(std::span<const double> y,
                                 std::span<const double> f,
                                 double rel_threshold) {
  if (y.size() != f.size() || y.size() < 3)
    throw std::invalid_argument("grid too small");
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, v);
  const double floor = rel_threshold * fmax;
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (f[i] > floor && f[i] > f[i - 1] && f[i] >= f[i + 1]) {
      // Skip the flat continuation of a plateau already reported.
      if (!out.empty() && f[i] == f[i - 1]) continue;
      out.push_back(y[i]);
    }
  }
  return out;
}

SequentialDensity sequential_var_density(
    const ChainArchive& archive,
    const std::array<std::vector<double>, 2>& growth, int p, int grid_points) {
  if (archive.records.empty()) throw std::invalid_argument("empty archive");
  const int T = static_cast<int>(growth[0].size());
  if (T <= p) throw std::invalid_argument("series shorter than lag order");

  double lo = growth[0][0], hi = growth[0][0];
  for (int i = 0; i < 2; ++i) {
    for (double v : growth[i]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double pad = 0.25 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double step = (hi - lo) / (grid_points - 1);

  SequentialDensity out;
  const int n = T - p;
  out.t.reserve(static_cast<std::size_t>(n) * grid_points);
  for (int t = p; t < T; ++t) {
    for (int g = 0; g < grid_points; ++g) {
      out.t.push_back(t);
      out.y.push_back(lo + g * step);
    }
  }
  out.f1.assign(out.y.size(), 0.0);
  out.f2.assign(out.y.size(), 0.0);

  for (const auto& rec : archive.records) {
    if (rec.aux.size() < static_cast<std::size_t>(4 * p))
      throw std::invalid_argument("record lacks VAR coefficients");
    for (int i = 0; i < 2; ++i) {
      // Renormalize over archived components.
      const auto& w = rec.weights[i];
      double wsum = 0.0;
      for (std::size_t k = 0; k + 1 < w.size(); ++k) wsum += w[k];
      if (!(wsum > 0.0)) continue;
      for (int t = p; t < T; ++t) {
        double offset = 0.0;
        for (int lag = 1; lag <= p; ++lag) {
          offset += rec.aux[i * 2 * p + (lag - 1)] * growth[0][t - lag];
          offset += rec.aux[i * 2 * p + (p + lag - 1)] * growth[1][t - lag];
        }
        const std::size_t base = static_cast<std::size_t>(t - p) * grid_points;
        for (int g = 0; g < grid_points; ++g) {
          const double yv = out.y[base + g];
          double dens = 0.0;
          for (std::size_t k = 0; k + 1 < w.size(); ++k) {
            const Atom& a = rec.atoms[k].second;
            const double d = yv - (a.mu + offset);
            dens += (w[k] / wsum) *
                    std::exp(-0.5 * d * d / a.sigma2) /
                    std::sqrt(2.0 * M_PI * a.sigma2);
          }
          (i == 0 ? out.f1 : out.f2)[base + g] += dens;
        }
      }
    }
  }
  const double inv = 1.0 / archive.records.size();
  for (double& v : out.f1) v *= inv;
  for (double& v : out.f2) v *= inv;
  return out;
}

}  // namespace bpddp
