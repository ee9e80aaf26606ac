// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>

#include <iostream>

#include "bpddp/errors.hpp"
#include "bpddp/harness.hpp"
#include "bpddp/simd/kernels.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int chains = 0;
  std::string simd_level;
  std::string archive_path;  // analyze
};

bpddp::RunConfig load(const CliOverrides& cli, const std::string& command) {
  bpddp::RunConfig cfg = cli.config_path.empty()
                             ? bpddp::RunConfig{}
                             : bpddp::RunConfig::from_file(cli.config_path);
  if (!cfg.command.empty() && cfg.command != command)
    throw bpddp::ConfigError("config run.command is '" + cfg.command +
                             "' but the subcommand is '" + command + "'");
  if (cli.seed_set) {
    cfg.seed = cli.seed;
    cfg.seed_set = true;
  }
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (cli.chains > 0) cfg.chains = cli.chains;
  if (!cli.simd_level.empty()) {
    if (cli.simd_level == "scalar")
      bpddp::simd::force(bpddp::simd::Level::scalar);
    else if (cli.simd_level == "avx2")
      bpddp::simd::force(bpddp::simd::Level::avx2);
    else if (cli.simd_level != "auto")
      throw bpddp::ConfigError("--simd must be auto, scalar, or avx2");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependent stick-breaking mixture sampler and analysis tools"};
  app.require_subcommand(1);

  CliOverrides cli;
  app.add_option("--config", cli.config_path, "config file (key = value sections)");
  auto* seed_opt = app.add_option("--seed", cli.seed, "seed override");
  app.add_option("--out", cli.out_dir, "output directory override");
  app.add_option("--chains", cli.chains, "chain count override");
  app.add_option("--simd", cli.simd_level, "kernel dispatch: auto|scalar|avx2");

  auto* prior = app.add_subcommand("prior-check",
                                   "closed-form vs Monte Carlo prior checks");
  auto* fitg = app.add_subcommand("fit-gaussian", "fit the Gaussian mixture");
  auto* fitv = app.add_subcommand("fit-var", "fit the VAR mixture");
  auto* analyze = app.add_subcommand("analyze", "re-run emitters on an archive");
  analyze->add_option("--archive", cli.archive_path, "archive file")->required();
  auto* gen = app.add_subcommand("generate-data", "write a synthetic dataset");

  CLI11_PARSE(app, argc, argv);
  cli.seed_set = seed_opt->count() > 0;

  try {
    if (prior->parsed()) {
      bpddp::run_prior_check(load(cli, "prior-check"));
    } else if (fitg->parsed()) {
      const auto path = bpddp::run_fit_gaussian(load(cli, "fit-gaussian"));
      std::cout << "archive: " << path.string() << "\n";
    } else if (fitv->parsed()) {
      const auto path = bpddp::run_fit_var(load(cli, "fit-var"));
      std::cout << "archive: " << path.string() << "\n";
    } else if (analyze->parsed()) {
      bpddp::run_analyze(load(cli, "analyze"), cli.archive_path);
    } else if (gen->parsed()) {
      bpddp::run_generate_data(load(cli, "generate-data"));
    }
  } catch (const bpddp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bpddp::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bpddp::kExitConfig;
  } catch (const bpddp::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return bpddp::kExitIo;
  } catch (const bpddp::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return bpddp::kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bpddp::kExitNumeric;
  }
  return bpddp::kExitOk;
}
