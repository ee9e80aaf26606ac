// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "bpddp/config.hpp"
#include "bpddp/model_gaussian.hpp"
#include "bpddp/model_var.hpp"
#include "bpddp/slice_gibbs.hpp"

namespace bpddp {

/// One fully-described run: everything comes from the config file plus the
/// explicit seed. Wall-clock seeding is not available by design.
struct RunConfig {
  std::string command;  // prior-check | fit-gaussian | fit-var | analyze |
                        // generate-data (optional echo of the subcommand)

  // construction
  Scheme scheme = Scheme::H1;
  double discount = 0.0;
  bool alpha_fixed = false;
  double alpha1 = 1.0, alpha2 = 1.0;  // when alpha_fixed
  std::array<double, 4> zeta{0.01, 0.01, 0.01, 0.01};

  // model
  std::string model_kind = "gaussian";  // gaussian | var
  double s2 = 0.1;
  double lambda = 0.5;
  int p = 4;

  // schedule
  int sweeps = 20000;
  int burn_in = 10000;
  int thin = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tau2 = 0.05;
  double kappa = 2.0;
  bool kappa_autotune = true;
  int chains = 1;
  int workers = 1;

  // io
  std::filesystem::path data_path;
  std::filesystem::path out_dir;
  bool data_is_growth = false;  // var input already transformed

  // prior-check
  std::string pc_scheme = "H2";
  int pc_r = 2;
  std::vector<double> pc_alpha_grid;  // values crossed as (a1, a2)
  long long pc_samples = 1000000;
  bool pc_measure = false;  // also Monte Carlo the measure correlation
  int pc_truncation = 500;
  long long pc_measure_samples = 200000;

  // generate-data
  std::string gen_model = "Mix1";  // Mix1|Mix2|Mix3|var2
  int gen_n = 50;

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_config(const ConfigFile& cfg);
  void validate() const;
};

/// Seed for chain index c derived from the base seed (stable).
std::uint64_t chain_seed(std::uint64_t base, int chain_index);

void run_prior_check(const RunConfig& cfg);
void run_generate_data(const RunConfig& cfg);
/// Runs chains (worker pool), writes archives and analysis artifacts,
/// prints an acceptance summary per chain. Returns the archive path of
/// chain 0.
std::filesystem::path run_fit_gaussian(const RunConfig& cfg);
std::filesystem::path run_fit_var(const RunConfig& cfg);
/// Re-runs the emitters on an existing archive directory.
void run_analyze(const RunConfig& cfg, const std::filesystem::path& archive_path);

/// Shared emitters (density grid, cluster counts, pairwise matrices,
/// LS clustering, alpha traces). `growth` enables the sequential VAR panel.
void emit_analysis(const ChainArchive& archive,
                   const std::filesystem::path& dir,
                   const std::array<std::vector<double>, 2>* growth, int p);

}  // namespace bpddp
