// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bpddp/archive.hpp"
#include "bpddp/config.hpp"
#include "bpddp/csv.hpp"
#include "bpddp/errors.hpp"
#include "bpddp/harness.hpp"

using namespace bpddp;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("config parsing: sections, types, errors") {
  const auto cfg = ConfigFile::parse_string(
      "# comment\n"
      "[run]\n"
      "command = fit-gaussian\n"
      "[schedule]\n"
      "sweeps = 500\n"
      "seed = 42\n"
      "tau2 = 0.07\n"
      "flag = true\n"
      "grid = 0.5 1 2\n");
  CHECK(cfg.get_string("run.command") == "fit-gaussian");
  CHECK(cfg.get_int("schedule.sweeps") == 500);
  CHECK(cfg.get_u64("schedule.seed") == 42);
  CHECK(cfg.get_double("schedule.tau2") == doctest::Approx(0.07));
  CHECK(cfg.get_bool("schedule.flag", false));
  CHECK(cfg.get_doubles("schedule.grid") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(cfg.get_int("schedule.missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get_string("schedule.missing"), ConfigError);

  CHECK_THROWS_AS(ConfigFile::parse_string("[bad\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("noequals\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("[s]\nk = 1\nk = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("[s]\nk = abc\n").get_int("s.k"),
                  ConfigError);

  // Error messages carry file/line positions.
  try {
    ConfigFile::parse_string("[s]\nk = abc\n", "test.cfg").get_int("s.k");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.cfg:2") != std::string::npos);
  }
}

TEST_CASE("run config validation") {
  RunConfig rc;
  rc.seed_set = false;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  rc.seed_set = true;
  rc.sweeps = 100;
  rc.burn_in = 100;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  rc.burn_in = 50;
  rc.thin = 0;
  CHECK_THROWS_AS(rc.validate(), ConfigError);
  rc.thin = 2;
  rc.validate();
}

TEST_CASE("series csv round trip") {
  SeriesCsv csv;
  csv.meta = {{"generator", "Mix1"}, {"n", "3"}};
  csv.series[0] = {1.5, -2.25, 1.0 / 3.0};
  csv.series[1] = {0.125, 7.0, -1e-17};
  const auto path = temp_file("bpddp_series.csv");
  csv.write(path);
  const SeriesCsv back = SeriesCsv::read(path);
  CHECK(back.series[0] == csv.series[0]);
  CHECK(back.series[1] == csv.series[1]);
  CHECK(back.meta == csv.meta);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(SeriesCsv::read(temp_file("missing_file.csv")), IoError);
}

TEST_CASE("paired csv round trip and line-numbered errors") {
  PairedSeriesCsv csv;
  csv.meta = {{"transform", "growth"}};
  csv.dates = {"1971-04", "1971-05"};
  csv.series[0] = {0.01, -0.02};
  csv.series[1] = {0.005, 0.001};
  const auto path = temp_file("bpddp_paired.csv");
  csv.write(path);
  const PairedSeriesCsv back = PairedSeriesCsv::read(path);
  CHECK(back.series[0] == csv.series[0]);
  CHECK(back.dates == csv.dates);
  std::filesystem::remove(path);

  const auto bad = temp_file("bpddp_bad.csv");
  {
    std::ofstream out(bad);
    out << "date,series1,series2\n1971-04,0.01,zzz\n";
  }
  try {
    PairedSeriesCsv::read(bad);
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::filesystem::remove(bad);
}

TEST_CASE("archive round trip preserves every field") {
  ChainArchive a;
  a.set_meta("schema", "bpddp-chain-v1");
  a.set_meta("model", "gaussian");
  a.set_meta("atoms", "common");
  a.traces.push_back({1, {2, 3}, 0.5, 1.25, 4, 7});
  a.predictive.push_back({1, -1.5, 2.5});
  ArchiveRecord rec;
  rec.sweep = 1;
  rec.alpha1 = 1.0 / 3.0;
  rec.alpha2 = 2e-17;
  rec.vstar_accepted = 10;
  rec.vstar_attempted = 20;
  rec.alpha_accepted = 3;
  rec.alpha_attempted = 5;
  rec.allocations = {{1, 2, 2}, {1, 1, 4}};
  rec.atoms = {{1, {0.5, 2.0}}, {2, {-0.25, 0.125}}};
  rec.weights = {{0.5, 0.25, 0.25}, {0.4, 0.4, 0.2}};
  rec.aux = {0.1, -0.2, 0.3};
  a.records.push_back(rec);

  const auto path = temp_file("bpddp_archive.txt");
  a.write(path);
  const ChainArchive b = ChainArchive::read(path);

  CHECK(b.meta_value("model") == "gaussian");
  CHECK(b.common_atoms());
  REQUIRE(b.traces.size() == 1);
  CHECK(b.traces[0].alpha2 == 1.25);
  CHECK(b.traces[0].clusters == std::array<int, 2>{2, 3});
  REQUIRE(b.predictive.size() == 1);
  CHECK(b.predictive[0].y1 == -1.5);
  REQUIRE(b.records.size() == 1);
  const auto& r = b.records[0];
  CHECK(r.alpha1 == rec.alpha1);
  CHECK(r.alpha2 == rec.alpha2);  // 17 digits round-trip exactly
  CHECK(r.allocations == rec.allocations);
  CHECK(r.atoms.size() == 2);
  CHECK(r.atoms[1].second.sigma2 == 0.125);
  CHECK(r.weights == rec.weights);
  CHECK(r.aux == rec.aux);

  // Rewriting the parsed archive reproduces the bytes exactly.
  const auto path2 = temp_file("bpddp_archive2.txt");
  b.write(path2);
  std::ifstream f1(path), f2(path2);
  const std::string s1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("run config from config text") {
  const auto cfg = ConfigFile::parse_string(
      "[construction]\n"
      "scheme = H2\n"
      "zeta = 100 400 100 200\n"
      "[model]\n"
      "kind = gaussian\n"
      "s2 = 0.2\n"
      "[schedule]\n"
      "sweeps = 1000\n"
      "burn_in = 200\n"
      "seed = 9\n"
      "[data]\n"
      "path = data.csv\n"
      "out = outdir\n");
  const RunConfig rc = RunConfig::from_config(cfg);
  CHECK(rc.scheme == Scheme::H2);
  CHECK(rc.zeta == std::array<double, 4>{100, 400, 100, 200});
  CHECK(rc.s2 == doctest::Approx(0.2));
  CHECK(rc.sweeps == 1000);
  CHECK(rc.seed_set);
  CHECK(rc.out_dir == "outdir");
  rc.validate();
}
