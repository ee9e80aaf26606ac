// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "bpddp/csv.hpp"
#include "bpddp/errors.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BPDDP_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("generate-data writes a reproducible dataset with metadata") {
  TempDir dir("bpddp_cli_gen");
  const std::string cfg_path = (dir.path / "gen.cfg").string();
  write_file(cfg_path,
             "[generate]\nmodel = Mix2\nn = 40\n[data]\nout = " +
                 (dir.path / "d1").string() + "\n");
  CHECK(run_cli("--config " + cfg_path + " --seed 5 generate-data") == 0);
  CHECK(run_cli("--config " + cfg_path + " --seed 5 --out " +
                (dir.path / "d2").string() + " generate-data") == 0);

  const auto csv = bpddp::SeriesCsv::read(dir.path / "d1" / "data.csv");
  CHECK(csv.series[0].size() == 40);
  CHECK(csv.series[1].size() == 40);
  bool has_components = false;
  for (const auto& [k, v] : csv.meta)
    if (k == "components1") has_components = true;
  CHECK(has_components);

  CHECK(slurp(dir.path / "d1" / "data.csv") ==
        slurp(dir.path / "d2" / "data.csv"));
}

TEST_CASE("exit codes distinguish config, io, and bad-usage failures") {
  TempDir dir("bpddp_cli_codes");
  // Missing seed -> config error.
  write_file(dir.path / "noseed.cfg", "[generate]\nmodel = Mix1\nn = 5\n");
  CHECK(run_cli("--config " + (dir.path / "noseed.cfg").string() +
                " generate-data") == bpddp::kExitConfig);
  // n = 0 -> config error.
  write_file(dir.path / "zero.cfg", "[generate]\nmodel = Mix1\nn = 0\n");
  CHECK(run_cli("--config " + (dir.path / "zero.cfg").string() +
                " --seed 1 generate-data") == bpddp::kExitConfig);
  // Unknown generator id -> config error class.
  write_file(dir.path / "bad.cfg", "[generate]\nmodel = MixZ\nn = 5\n");
  CHECK(run_cli("--config " + (dir.path / "bad.cfg").string() +
                " --seed 1 generate-data") == bpddp::kExitConfig);
  // Missing data file -> io error.
  write_file(dir.path / "fit.cfg",
             "[schedule]\nsweeps = 20\nburn_in = 10\n[data]\npath = " +
                 (dir.path / "nothere.csv").string() + "\nout = " +
                 (dir.path / "out").string() + "\n");
  CHECK(run_cli("--config " + (dir.path / "fit.cfg").string() +
                " --seed 1 fit-gaussian") == bpddp::kExitIo);
  // Empty prior-check grid -> config error.
  write_file(dir.path / "pc.cfg", "[prior_check]\nscheme = H2\n");
  CHECK(run_cli("--config " + (dir.path / "pc.cfg").string() +
                " --seed 1 prior-check") == bpddp::kExitConfig);
  // Mismatched run.command -> config error.
  write_file(dir.path / "cmd.cfg",
             "[run]\ncommand = fit-var\n[generate]\nmodel = Mix1\nn = 5\n");
  CHECK(run_cli("--config " + (dir.path / "cmd.cfg").string() +
                " --seed 1 generate-data") == bpddp::kExitConfig);
}

TEST_CASE("fit-gaussian end to end: artifacts, determinism, analyze") {
  TempDir dir("bpddp_cli_fit");
  write_file(dir.path / "gen.cfg",
             "[generate]\nmodel = Mix1\nn = 24\n[data]\nout = " +
                 (dir.path / "data").string() + "\n");
  REQUIRE(run_cli("--config " + (dir.path / "gen.cfg").string() +
                  " --seed 3 generate-data") == 0);

  const std::string fit_cfg =
      "[construction]\nscheme = H1\nzeta = 0.01 0.01 0.01 0.01\n"
      "[model]\nkind = gaussian\n"
      "[schedule]\nsweeps = 400\nburn_in = 200\nthin = 5\nseed = 77\n"
      "[data]\npath = " +
      (dir.path / "data" / "data.csv").string() + "\nout = " +
      (dir.path / "run1").string() + "\n";
  write_file(dir.path / "fit.cfg", fit_cfg);
  REQUIRE(run_cli("--config " + (dir.path / "fit.cfg").string() +
                  " fit-gaussian") == 0);

  for (const char* artifact :
       {"archive.txt", "density_grid.csv", "cluster_counts.csv",
        "alpha_trace.csv", "pairwise_11.csv", "pairwise_22.csv",
        "pairwise_12.csv", "ls_clustering_1.csv", "ls_clustering_2.csv"}) {
    CHECK(fs::exists(dir.path / "run1" / artifact));
  }

  // Same seed, second run: byte-identical archive.
  REQUIRE(run_cli("--config " + (dir.path / "fit.cfg").string() + " --out " +
                  (dir.path / "run2").string() + " fit-gaussian") == 0);
  CHECK(slurp(dir.path / "run1" / "archive.txt") ==
        slurp(dir.path / "run2" / "archive.txt"));

  // analyze re-emits from the archive alone.
  REQUIRE(run_cli("--seed 1 --out " + (dir.path / "re").string() +
                  " analyze --archive " +
                  (dir.path / "run1" / "archive.txt").string()) == 0);
  CHECK(slurp(dir.path / "re" / "density_grid.csv") ==
        slurp(dir.path / "run1" / "density_grid.csv"));
  CHECK(slurp(dir.path / "re" / "ls_clustering_1.csv") ==
        slurp(dir.path / "run1" / "ls_clustering_1.csv"));
}

TEST_CASE("multi-chain runs write per-chain directories") {
  TempDir dir("bpddp_cli_chains");
  write_file(dir.path / "gen.cfg",
             "[generate]\nmodel = Mix1\nn = 16\n[data]\nout = " +
                 (dir.path / "data").string() + "\n");
  REQUIRE(run_cli("--config " + (dir.path / "gen.cfg").string() +
                  " --seed 2 generate-data") == 0);
  write_file(dir.path / "fit.cfg",
             "[schedule]\nsweeps = 120\nburn_in = 60\nthin = 4\nseed = 5\n"
             "chains = 2\nworkers = 2\n[data]\npath = " +
                 (dir.path / "data" / "data.csv").string() + "\nout = " +
                 (dir.path / "out").string() + "\n");
  REQUIRE(run_cli("--config " + (dir.path / "fit.cfg").string() +
                  " fit-gaussian") == 0);
  CHECK(fs::exists(dir.path / "out" / "chain_00" / "archive.txt"));
  CHECK(fs::exists(dir.path / "out" / "chain_01" / "archive.txt"));
  // Distinct derived seeds, distinct chains.
  CHECK(slurp(dir.path / "out" / "chain_00" / "archive.txt") !=
        slurp(dir.path / "out" / "chain_01" / "archive.txt"));
}

TEST_CASE("prior-check emits the documented csv columns") {
  TempDir dir("bpddp_cli_pc");
  write_file(dir.path / "pc.cfg",
             "[prior_check]\nscheme = H2\nr = 2\nalphas = 1\nsamples = 20000\n"
             "[data]\nout = " +
                 (dir.path / "out").string() + "\n");
  REQUIRE(run_cli("--config " + (dir.path / "pc.cfg").string() +
                  " --seed 4 prior-check") == 0);
  const std::string corr = slurp(dir.path / "out" / "correlations.csv");
  CHECK(corr.find("scheme,r,alphas,l,i,j,closed_form,monte_carlo,stderr") == 0);
  CHECK(corr.find("H2,2,1;1,0,1,2,") != std::string::npos);
  const std::string ks = slurp(dir.path / "out" / "marginal_ks.csv");
  CHECK(ks.find("ks_stat") != std::string::npos);
}
