// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <span>
#include <vector>

#include "bpddp/archive.hpp"

namespace bpddp {

/// Posterior co-allocation frequencies P[s,t] = (1/M) sum_l 1{D_is^l = D_jt^l}.
struct PairwiseMatrix {
  int rows = 0, cols = 0;
  int samples = 0;
  std::vector<double> p;
  double at(int s, int t) const { return p[static_cast<std::size_t>(s) * cols + t]; }
};

/// Cross-series matrices (i != j) are only meaningful under common atoms;
/// requesting one from a non-common-atoms archive is a contract error.
PairwiseMatrix pairwise_matrix(const ChainArchive& archive, int i, int j);

struct LsClustering {
  int record_index = 0;  // index into archive.records
  int sweep = 0;
  double loss = 0.0;
  std::vector<int> allocation;
  std::vector<std::pair<int, Atom>> atoms;
};

/// Dahl's least-squares clustering: the archived draw whose co-clustering
/// indicator matrix is L2-closest to the pairwise matrix. Ties break toward
/// the earliest sweep.
LsClustering least_squares_clustering(const ChainArchive& archive, int i);

/// Per-sweep occupied-component counts (from the trace rows).
std::vector<std::array<int, 2>> cluster_count_trace(const ChainArchive& archive);

/// Histogram of post-burn-in cluster counts for one series, and its mode.
std::vector<std::pair<int, long long>> cluster_count_histogram(
    const ChainArchive& archive, int i);
int cluster_count_mode(const ChainArchive& archive, int i);

/// Running means; last entry equals the overall mean.
std::vector<double> ergodic_average(std::span<const double> trace);

struct DensityGrid {
  std::vector<double> y;
  std::vector<double> f1, f2;
  double integral(int series) const;  // trapezoid
};

double silverman_bandwidth(std::span<const double> sample);

/// Gaussian KDE of the archived predictive draws on a shared grid.
DensityGrid predictive_density_grid(const ChainArchive& archive,
                                    int points = 512);
DensityGrid density_grid_from_samples(std::span<const double> s1,
                                      std::span<const double> s2, int points);

/// Grid locations of strict local maxima with height above
/// rel_threshold * max(f).
std::vector<double> local_maxima(std::span<const double> y,
                                 std::span<const double> f,
                                 double rel_threshold = 1e-3);

/// Sequential predictive density for the VAR model: full-sample posterior
/// draws, evaluated at each time point's own predictors. Long format rows
/// (t, y, f_1, f_2). Occupied-component weights are renormalized over the
/// archived components.
struct SequentialDensity {
  std::vector<int> t;
  std::vector<double> y;
  std::vector<double> f1, f2;
};
SequentialDensity sequential_var_density(
    const ChainArchive& archive, const std::array<std::vector<double>, 2>& growth,
    int p, int grid_points = 81);

}  // namespace bpddp
