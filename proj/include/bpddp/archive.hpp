// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bpddp/mixture_model.hpp"

namespace bpddp {

// On-disk chain archive: line-delimited text, stable across runs for a fixed
// seed and build. Schema (all floats printed with 17 significant digits):
//
//   # bpddp chain archive v1
//   meta <key> <value>
//   trace <sweep> <k1> <k2> <alpha1> <alpha2> <dstar> <nstar>
//   pred <sweep> <y1> <y2>
//   rec <sweep> <alpha1> <alpha2> <vacc> <vatt> <aacc> <aatt>
//   recd1 <D_11 ... D_1n1>
//   recd2 <D_21 ... D_2n2>
//   reca <k> <mu> <sigma2>          (one line per occupied component)
//   recw1 <w_k ...> <leftover>      (weights aligned with the reca lines)
//   recw2 <w_k ...> <leftover>
//   recaux <v1> ... <vm>            (optional model auxiliary parameters)
//   recend
//
// trace rows cover every sweep; pred rows every post-burn-in sweep; rec
// blocks every thinned post-burn-in sweep.

struct TraceRow {
  int sweep = 0;
  std::array<int, 2> clusters{0, 0};
  double alpha1 = 0.0, alpha2 = 0.0;
  int dstar = 0;
  int nstar = 0;
};

struct PredRow {
  int sweep = 0;
  double y1 = 0.0, y2 = 0.0;
};

struct ArchiveRecord {
  int sweep = 0;
  double alpha1 = 0.0, alpha2 = 0.0;
  long long vstar_accepted = 0, vstar_attempted = 0;
  long long alpha_accepted = 0, alpha_attempted = 0;
  std::vector<std::vector<int>> allocations;       // one row per series
  std::vector<std::pair<int, Atom>> atoms;         // occupied components
  // Per series: weights of the occupied components (reca order) followed
  // by the leftover mass.
  std::vector<std::vector<double>> weights;
  std::vector<double> aux;                         // model auxiliary block
};

struct ChainArchive {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<TraceRow> traces;
  std::vector<PredRow> predictive;
  std::vector<ArchiveRecord> records;

  void set_meta(const std::string& key, const std::string& value);
  std::string meta_value(const std::string& key) const;  // "" when absent
  bool common_atoms() const { return meta_value("atoms") == "common"; }

  void write(const std::filesystem::path& path) const;
  static ChainArchive read(const std::filesystem::path& path);
};

/// %.17g formatting used for every numeric emission (exact round trip).
std::string format_double(double v);

}  // namespace bpddp
