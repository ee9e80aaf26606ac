// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "bpddp/csv.hpp"
#include "bpddp/errors.hpp"
#include "bpddp/posterior_analysis.hpp"
#include "bpddp/simd/kernels.hpp"
#include "bpddp/stats.hpp"

namespace bpddp {

namespace {

std::string join_doubles(const std::vector<double>& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::uint64_t chain_seed(std::uint64_t base, int chain_index) {
  RandomStream root(base);
  // Reserve low spawn ids for the engine's own streams.
  std::uint64_t z = 0;
  RandomStream derived = root.spawn(1000 + chain_index);
  z = derived.next_u64();
  return z;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return from_config(ConfigFile::parse(path));
}

RunConfig RunConfig::from_config(const ConfigFile& cfg) {
  RunConfig rc;
  rc.command = cfg.get_string("run.command", "");

  rc.scheme = scheme_from_name(cfg.get_string("construction.scheme", "H1"));
  rc.discount = cfg.get_double("construction.l", 0.0);
  rc.alpha_fixed = cfg.get_bool("construction.alpha_fixed", false);
  rc.alpha1 = cfg.get_double("construction.alpha1", 1.0);
  rc.alpha2 = cfg.get_double("construction.alpha2", 1.0);
  if (cfg.has("construction.zeta")) {
    const auto z = cfg.get_doubles("construction.zeta");
    if (z.size() != 4)
      throw ConfigError("construction.zeta needs four values");
    std::copy(z.begin(), z.end(), rc.zeta.begin());
  }

  rc.model_kind = cfg.get_string("model.kind", "gaussian");
  rc.s2 = cfg.get_double("model.s2", 0.1);
  rc.lambda = cfg.get_double("model.lambda", 0.5);
  rc.p = static_cast<int>(cfg.get_int("model.p", 4));

  rc.sweeps = static_cast<int>(cfg.get_int("schedule.sweeps", 20000));
  rc.burn_in = static_cast<int>(cfg.get_int("schedule.burn_in", 10000));
  rc.thin = static_cast<int>(cfg.get_int("schedule.thin", 10));
  if (cfg.has("schedule.seed")) {
    rc.seed = cfg.get_u64("schedule.seed");
    rc.seed_set = true;
  }
  rc.tau2 = cfg.get_double("schedule.tau2", 0.05);
  rc.kappa = cfg.get_double("schedule.kappa", 2.0);
  rc.kappa_autotune = cfg.get_bool("schedule.kappa_autotune", true);
  rc.chains = static_cast<int>(cfg.get_int("schedule.chains", 1));
  rc.workers = static_cast<int>(cfg.get_int("schedule.workers", 1));

  rc.data_path = cfg.get_string("data.path", "");
  rc.out_dir = cfg.get_string("data.out", "out");
  rc.data_is_growth = cfg.get_bool("data.growth", false);

  rc.pc_scheme = cfg.get_string("prior_check.scheme", "H2");
  rc.pc_r = static_cast<int>(cfg.get_int("prior_check.r", 2));
  if (cfg.has("prior_check.alphas"))
    rc.pc_alpha_grid = cfg.get_doubles("prior_check.alphas");
  rc.pc_samples = cfg.get_int("prior_check.samples", 1000000);
  rc.pc_measure = cfg.get_bool("prior_check.measure", false);
  rc.pc_truncation = static_cast<int>(cfg.get_int("prior_check.truncation", 500));
  rc.pc_measure_samples = cfg.get_int("prior_check.measure_samples", 200000);

  rc.gen_model = cfg.get_string("generate.model", "Mix1");
  rc.gen_n = static_cast<int>(cfg.get_int("generate.n", 50));
  return rc;
}

void RunConfig::validate() const {
  if (!seed_set) throw ConfigError("seed is required (schedule.seed or --seed)");
  if (sweeps <= burn_in || burn_in < 0)
    throw ConfigError("schedule must satisfy sweeps > burn_in >= 0");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (chains < 1) throw ConfigError("chains must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (model_kind != "gaussian" && model_kind != "var")
    throw ConfigError("model.kind must be gaussian or var");
}

// ---- prior-check ------------------------------------------------------------

void run_prior_check(const RunConfig& cfg) {
  if (!cfg.seed_set) throw ConfigError("seed is required");
  if (cfg.pc_alpha_grid.empty())
    throw ConfigError("prior_check.alphas must be a non-empty grid");
  ensure_dir(cfg.out_dir);

  StickConstruction c;
  c.scheme = scheme_from_name(cfg.pc_scheme);
  c.r = cfg.pc_r;
  c.discount = 0.0;

  auto corr_out = open_out(cfg.out_dir / "correlations.csv");
  corr_out << "scheme,r,alphas,l,i,j,closed_form,monte_carlo,stderr\n";
  auto meas_out = cfg.pc_measure
                      ? std::optional<std::ofstream>(
                            open_out(cfg.out_dir / "measure_correlations.csv"))
                      : std::nullopt;
  if (meas_out)
    *meas_out << "scheme,r,alphas,l,i,j,closed_form,monte_carlo,stderr\n";
  auto ks_out = open_out(cfg.out_dir / "marginal_ks.csv");
  ks_out << "scheme,r,alphas,l,i,n,ks_stat,ks_crit_1pct\n";

  RandomStream root(cfg.seed);
  std::uint64_t stream_id = 0;

  for (double a1 : cfg.pc_alpha_grid) {
    for (double a2 : cfg.pc_alpha_grid) {
      if (c.scheme == Scheme::H1) {
        c.alphas = {a1, a2};
      } else {
        c.alphas.assign(cfg.pc_r, a2);
        c.alphas[0] = a1;
      }
      c.validate();
      const std::string alpha_str = join_doubles(c.alphas);

      RandomStream rng = root.spawn(stream_id++);
      const long long n = cfg.pc_samples;
      std::vector<double> s1(n), s2(n);
      for (long long m = 0; m < n; ++m) {
        const auto s = sample_stick_vector(c, 1, rng);
        s1[m] = s[0];
        s2[m] = s[1];
      }
      const double closed = stick_correlation(c, 1, 2);
      const double mc = pearson_correlation(s1, s2);
      // Delta-method scale for the correlation estimate.
      const double se = (1.0 - mc * mc) / std::sqrt(static_cast<double>(n));
      corr_out << scheme_name(c.scheme) << "," << c.r << "," << alpha_str << ","
               << format_double(c.discount) << ",1,2," << format_double(closed)
               << "," << format_double(mc) << "," << format_double(se) << "\n";

      for (int i = 1; i <= 2; ++i) {
        const auto& s = i == 1 ? s1 : s2;
        const BetaParams law = c.marginal_law(i, 1);
        const double stat =
            ks_statistic(s, [&](double x) { return beta_cdf(x, law); });
        ks_out << scheme_name(c.scheme) << "," << c.r << "," << alpha_str << ","
               << format_double(c.discount) << "," << i << "," << n << ","
               << format_double(stat) << ","
               << format_double(ks_critical(0.01, s.size())) << "\n";
      }

      if (meas_out) {
        RandomStream mrng = root.spawn(stream_id++);
        AtomScheme atoms = AtomScheme::common(
            [](RandomStream& r) { return sample_normal(0.0, 1.0, r); });
        const long long reps = cfg.pc_measure_samples;
        const std::size_t K = static_cast<std::size_t>(cfg.pc_truncation);
        std::vector<double> g1(reps), g2(reps);
        std::vector<std::uint8_t> mask(K);
        for (long long m = 0; m < reps; ++m) {
          const auto tm =
              sample_truncated_measures(c, atoms, cfg.pc_truncation, mrng);
          for (std::size_t k = 1; k <= K; ++k)
            mask[k - 1] = tm.atom(static_cast<int>(k), 1) < 0.0 ? 1 : 0;
          g1[m] = simd::masked_sum({tm.weights.data(), K}, mask);
          g2[m] = simd::masked_sum({tm.weights.data() + K, K}, mask);
        }
        const double closed_m = measure_correlation(c, 1, 2);
        const double mc_m = pearson_correlation(g1, g2);
        const double se_m =
            (1.0 - mc_m * mc_m) / std::sqrt(static_cast<double>(reps));
        *meas_out << scheme_name(c.scheme) << "," << c.r << "," << alpha_str
                  << "," << format_double(c.discount) << ",1,2,"
                  << format_double(closed_m) << "," << format_double(mc_m)
                  << "," << format_double(se_m) << "\n";
      }
    }
  }
}

// ---- generate-data ----------------------------------------------------------

void run_generate_data(const RunConfig& cfg) {
  if (!cfg.seed_set) throw ConfigError("seed is required");
  if (cfg.gen_n < 1) throw ConfigError("generate.n must be >= 1");
  ensure_dir(cfg.out_dir);
  RandomStream rng(cfg.seed);

  if (cfg.gen_model == "var2") {
    TwoRegimeVarConfig vc;
    vc.T = cfg.gen_n;
    const auto y = generate_two_regime_var(vc, rng);
    PairedSeriesCsv csv;
    csv.meta = {{"generator", "var2"},
                {"T", std::to_string(vc.T)},
                {"p", std::to_string(vc.p)},
                {"block", std::to_string(vc.block)},
                {"mu", format_double(vc.mu_low) + ";" + format_double(vc.mu_high)},
                {"sigma2", format_double(vc.sigma2_low) + ";" +
                               format_double(vc.sigma2_high)},
                {"seed", std::to_string(cfg.seed)},
                {"transform", "growth"}};
    for (int t = 0; t < vc.T; ++t) csv.dates.push_back(std::to_string(t));
    csv.series = y;
    csv.write(cfg.out_dir / "data.csv");
    return;
  }

  const MixModel m = mix_from_name(cfg.gen_model);
  const auto data = generate_mix_data(m, cfg.gen_n, rng);
  SeriesCsv csv;
  csv.meta.emplace_back("generator", mix_name(m));
  csv.meta.emplace_back("n", std::to_string(cfg.gen_n));
  csv.meta.emplace_back("seed", std::to_string(cfg.seed));
  const auto comps = mix_components(m);
  for (int i = 0; i < 2; ++i) {
    std::string table;
    for (const auto& cpt : comps[i]) {
      if (!table.empty()) table += ";";
      table += format_double(cpt.weight) + ":" + format_double(cpt.mean) +
               ":" + format_double(cpt.var);
    }
    csv.meta.emplace_back("components" + std::to_string(i + 1), table);
  }
  csv.series = data;
  csv.write(cfg.out_dir / "data.csv");
}

// ---- emitters ---------------------------------------------------------------

void emit_analysis(const ChainArchive& archive,
                   const std::filesystem::path& dir,
                   const std::array<std::vector<double>, 2>* growth, int p) {
  ensure_dir(dir);

  {
    const DensityGrid grid = predictive_density_grid(archive);
    auto out = open_out(dir / "density_grid.csv");
    out << "y,f1,f2\n";
    for (std::size_t g = 0; g < grid.y.size(); ++g)
      out << format_double(grid.y[g]) << "," << format_double(grid.f1[g])
          << "," << format_double(grid.f2[g]) << "\n";
  }

  {
    auto out = open_out(dir / "cluster_counts.csv");
    out << "count,freq1,freq2\n";
    const auto h1 = cluster_count_histogram(archive, 1);
    const auto h2 = cluster_count_histogram(archive, 2);
    std::map<int, std::array<long long, 2>> merged;
    for (const auto& [k, c] : h1) merged[k][0] = c;
    for (const auto& [k, c] : h2) merged[k][1] = c;
    for (const auto& [k, c] : merged)
      out << k << "," << c[0] << "," << c[1] << "\n";
  }

  {
    auto out = open_out(dir / "alpha_trace.csv");
    out << "sweep,alpha1,alpha2,erg_alpha1,erg_alpha2,k1,k2\n";
    std::vector<double> a1, a2;
    a1.reserve(archive.traces.size());
    for (const auto& t : archive.traces) {
      a1.push_back(t.alpha1);
      a2.push_back(t.alpha2);
    }
    const auto e1 = ergodic_average(a1);
    const auto e2 = ergodic_average(a2);
    for (std::size_t s = 0; s < archive.traces.size(); ++s) {
      const auto& t = archive.traces[s];
      out << t.sweep << "," << format_double(t.alpha1) << ","
          << format_double(t.alpha2) << "," << format_double(e1[s]) << ","
          << format_double(e2[s]) << "," << t.clusters[0] << ","
          << t.clusters[1] << "\n";
    }
  }

  const auto emit_pairwise = [&](int i, int j) {
    const PairwiseMatrix pm = pairwise_matrix(archive, i, j);
    auto out = open_out(dir / ("pairwise_" + std::to_string(i) +
                               std::to_string(j) + ".csv"));
    out << "s";
    for (int t = 0; t < pm.cols; ++t) out << "," << (t + 1);
    out << "\n";
    for (int s = 0; s < pm.rows; ++s) {
      out << (s + 1);
      for (int t = 0; t < pm.cols; ++t) out << "," << format_double(pm.at(s, t));
      out << "\n";
    }
  };
  emit_pairwise(1, 1);
  emit_pairwise(2, 2);
  if (archive.common_atoms()) emit_pairwise(1, 2);

  for (int i = 1; i <= 2; ++i) {
    const LsClustering ls = least_squares_clustering(archive, i);
    auto out = open_out(dir / ("ls_clustering_" + std::to_string(i) + ".csv"));
    out << "# sweep " << ls.sweep << "\n";
    out << "# loss " << format_double(ls.loss) << "\n";
    out << "index,cluster,mu,sigma2\n";
    for (std::size_t t = 0; t < ls.allocation.size(); ++t) {
      const int k = ls.allocation[t];
      double mu = 0.0, s2 = 0.0;
      for (const auto& [kk, atom] : ls.atoms) {
        if (kk == k) {
          mu = atom.mu;
          s2 = atom.sigma2;
          break;
        }
      }
      out << (t + 1) << "," << k << "," << format_double(mu) << ","
          << format_double(s2) << "\n";
    }
  }

  if (growth != nullptr) {
    const SequentialDensity sd = sequential_var_density(archive, *growth, p);
    auto out = open_out(dir / "sequential_density.csv");
    out << "t,y,f1,f2\n";
    for (std::size_t m = 0; m < sd.y.size(); ++m)
      out << sd.t[m] << "," << format_double(sd.y[m]) << ","
          << format_double(sd.f1[m]) << "," << format_double(sd.f2[m]) << "\n";
  }
}

// ---- fits -------------------------------------------------------------------

namespace {

struct ChainResult {
  std::filesystem::path archive_path;
  MhCounters counters;
};

// Worker pool over chain indices; each worker owns its stream and directory.
template <typename MakeModel>
std::filesystem::path run_chains(const RunConfig& cfg, MakeModel make_model,
                                 const std::array<std::vector<double>, 2>* growth) {
  cfg.validate();
  ensure_dir(cfg.out_dir);

  std::vector<std::filesystem::path> dirs(cfg.chains);
  for (int c = 0; c < cfg.chains; ++c) {
    dirs[c] = cfg.chains == 1
                  ? cfg.out_dir
                  : cfg.out_dir / ("chain_" + std::string(c < 10 ? "0" : "") +
                                   std::to_string(c));
    ensure_dir(dirs[c]);
  }

  std::mutex log_mutex;
  std::vector<std::string> errors;
  std::atomic<int> next{0};

  auto work = [&]() {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= cfg.chains) return;
      try {
        auto model = make_model();
        EngineOptions opts;
        opts.tuning.tau2 = cfg.tau2;
        opts.tuning.kappa = cfg.kappa;
        opts.tuning.kappa_autotune = cfg.kappa_autotune;
        opts.alpha_prior.alpha1 = {cfg.zeta[0], cfg.zeta[1]};
        opts.alpha_prior.alpha2 = {cfg.zeta[2], cfg.zeta[3]};
        opts.update_alpha = !cfg.alpha_fixed;

        opts.progress = [&log_mutex, c](int sweep, const GibbsState& st) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::cout << "chain " << c << " sweep " << sweep << " alpha=("
                    << format_double(st.alpha1) << ", "
                    << format_double(st.alpha2) << ") K=" << st.K() << "\n";
        };
        SliceGibbs engine(cfg.scheme, cfg.discount, *model, opts);
        ChainSchedule schedule;
        schedule.sweeps = cfg.sweeps;
        schedule.burn_in = cfg.burn_in;
        schedule.thin = cfg.thin;
        schedule.seed = cfg.chains == 1 ? cfg.seed : chain_seed(cfg.seed, c);

        ChainArchive archive = engine.run(schedule);
        archive.set_meta("model", cfg.model_kind);
        if (cfg.model_kind == "var")
          archive.set_meta("p", std::to_string(cfg.p));
        archive.set_meta("chain", std::to_string(c));
        archive.set_meta("base_seed", std::to_string(cfg.seed));
        archive.write(dirs[c] / "archive.txt");
        emit_analysis(archive, dirs[c], growth, cfg.p);

        const auto& k = engine.counters();
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cout << "chain " << c << ": V* acceptance "
                  << format_double(static_cast<double>(k.vstar_accepted) /
                                   std::max<long long>(1, k.vstar_attempted))
                  << ", alpha acceptance "
                  << format_double(static_cast<double>(k.alpha_accepted) /
                                   std::max<long long>(1, k.alpha_attempted))
                  << ", final kappa "
                  << format_double(engine.options().tuning.kappa) << "\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        errors.push_back("chain " + std::to_string(c) + ": " + e.what());
      }
    }
  };

  const int nworkers = std::min(cfg.workers, cfg.chains);
  std::vector<std::thread> pool;
  for (int w = 1; w < nworkers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (!errors.empty()) throw NumericError(errors.front());
  return dirs[0] / "archive.txt";
}

}  // namespace

std::filesystem::path run_fit_gaussian(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("data.path is required");
  const SeriesCsv csv = SeriesCsv::read(cfg.data_path);
  if (csv.series[0].empty() || csv.series[1].empty())
    throw ConfigError("both series need observations");

  GaussianModelSpec spec;
  spec.s2 = cfg.s2;
  spec.lambda = cfg.lambda;
  spec.zeta = cfg.zeta;

  return run_chains(
      cfg,
      [&]() {
        return std::make_unique<GaussianMixtureModel>(csv.series, spec);
      },
      nullptr);
}

std::filesystem::path run_fit_var(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("data.path is required");
  const PairedSeriesCsv csv = PairedSeriesCsv::read(cfg.data_path);

  std::array<std::vector<double>, 2> growth;
  const bool pre_transformed =
      cfg.data_is_growth || [&]() {
        for (const auto& [k, v] : csv.meta)
          if (k == "transform" && v == "growth") return true;
        return false;
      }();
  if (pre_transformed) {
    growth = csv.series;
  } else {
    growth[0] = growth_transform(csv.series[0]);
    growth[1] = growth_transform(csv.series[1]);
  }

  VarModelSpec spec;
  spec.p = cfg.p;
  spec.s2 = cfg.s2;
  spec.lambda = cfg.lambda;
  spec.zeta = cfg.zeta;

  return run_chains(
      cfg,
      [&]() { return std::make_unique<VarMixtureModel>(growth, spec); },
      &growth);
}

void run_analyze(const RunConfig& cfg, const std::filesystem::path& archive_path) {
  const ChainArchive archive = ChainArchive::read(archive_path);
  std::optional<std::array<std::vector<double>, 2>> growth;
  if (archive.meta_value("model") == "var" && !cfg.data_path.empty()) {
    const PairedSeriesCsv csv = PairedSeriesCsv::read(cfg.data_path);
    bool pre = cfg.data_is_growth;
    for (const auto& [k, v] : csv.meta)
      if (k == "transform" && v == "growth") pre = true;
    if (pre) {
      growth = csv.series;
    } else {
      growth = std::array<std::vector<double>, 2>{
          growth_transform(csv.series[0]), growth_transform(csv.series[1])};
    }
  }
  ensure_dir(cfg.out_dir);
  int p = cfg.p;
  const std::string pm = archive.meta_value("p");
  if (!pm.empty()) p = std::stoi(pm);
  emit_analysis(archive, cfg.out_dir, growth ? &*growth : nullptr, p);
}

}  // namespace bpddp
