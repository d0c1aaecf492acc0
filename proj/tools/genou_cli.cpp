// Command-line front end: runs experiment configs and estimators on series files.
//
// Exit status: 0 all comparisons pass, 1 a comparison (or task) failed,
// 2 usage or configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "genou/experiment.hpp"
#include "genou/extreme_stats.hpp"
#include "genou/series_io.hpp"

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw genou::ParseError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_config(const std::string& path, const GlobalFlags& g, const std::vector<std::string>& tasks_override) {
  genou::ExperimentConfig cfg;
  try {
    cfg = genou::parse_config(read_file(path));
  } catch (const genou::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (!tasks_override.empty()) cfg.tasks = tasks_override;
  if (g.seed) cfg.seed = *g.seed;
  if (g.workers) cfg.workers = std::max(1u, *g.workers);
  if (const char* env = std::getenv("GENOU_OUT_DIR"); env && *env) cfg.output_dir = env;
  if (!g.out.empty()) cfg.output_dir = g.out;

  genou::ExperimentReport report;
  int status = kPass;
  try {
    genou::run_experiment(cfg, &report);
  } catch (const genou::InvalidConfig& e) {
    std::cerr << e.what() << "\n";
    status = kUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    status = kFail;
  }
  try {
    for (const auto& p : genou::write_report(report, cfg, cfg.output_dir)) std::cerr << "wrote " << p << "\n";
  } catch (const std::exception& e) {
    std::cerr << "writing report: " << e.what() << "\n";
    return kFail;
  }
  std::cout << genou::report_csv(report);
  if (status != kPass) return status;
  return report.all_pass() ? kPass : kFail;
}

struct EstimateArgs {
  std::string input;
  std::string column = "V";
  std::string method = "hill";
  long k = 0;
  double threshold_q = 0.98;
  long block_len = 0;
  long max_lag = 1;
  bool mean_correct = false;
};

int run_estimate(const EstimateArgs& a, const GlobalFlags& g) {
  genou::SkeletonSeries s;
  try {
    std::ifstream f(a.input);
    if (!f) throw genou::ParseError("cannot read " + a.input);
    s = genou::read_series_csv(f);
  } catch (const genou::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  Eigen::ArrayXd x;
  if (a.column == "V") {
    // Drop V_0 when the file carries block data, so V aligns with H and I.
    x = s.H.size() > 0 ? Eigen::ArrayXd(s.V.tail(s.H.size())) : s.V;
  } else if (a.column == "H") {
    x = s.H;
  } else {
    x = s.I;
  }
  if (x.size() == 0) {
    std::cerr << "column " << a.column << " is empty\n";
    return kUsage;
  }

  std::ostringstream out;
  out << "estimator,params,value,se\n";
  auto put = [&](const std::string& est, const std::string& params, double v, double se) {
    out << est << ',' << params << ',' << genou::format_double(v) << ',' << genou::format_double(se) << '\n';
  };
  try {
    long block = a.block_len > 0 ? a.block_len : genou::default_block_len(x.size());
    double u = genou::quantile(x, a.threshold_q);
    std::uint64_t seed = g.seed.value_or(7);
    if (a.method == "hill") {
      long k = a.k > 0 ? a.k : genou::default_hill_k(x.size());
      auto t = genou::hill_estimator(x, k);
      put("hill", "k=" + std::to_string(k), t.alpha_hat, t.se);
    } else if (a.method == "blocks") {
      auto e = genou::extremal_index_blocks(x, u, block, seed);
      put("extremal_index_blocks", "q=" + genou::format_double(a.threshold_q) + ";b=" + std::to_string(block),
          e.theta_hat, e.se);
    } else if (a.method == "runs") {
      auto e = genou::extremal_index_runs(x, u, block, seed);
      put("extremal_index_runs", "q=" + genou::format_double(a.threshold_q) + ";r=" + std::to_string(block),
          e.theta_hat, e.se);
    } else if (a.method == "clusters") {
      auto c = genou::cluster_size_distribution(x, u, block);
      put("mean_cluster_size", "q=" + genou::format_double(a.threshold_q) + ";gap=" + std::to_string(block),
          c.mean_size, c.se);
    } else if (a.method == "acv") {
      auto acf = genou::sample_acv(x, a.max_lag, a.mean_correct);
      for (std::size_t l = 0; l < acf.lags.size(); ++l) {
        put("acv", "lag=" + std::to_string(acf.lags[l]), acf.gamma_hat[l], std::nan(""));
        put("acf", "lag=" + std::to_string(acf.lags[l]), acf.rho_hat[l], std::nan(""));
      }
    } else {
      std::cerr << "unknown method " << a.method << "\n";
      return kUsage;
    }
  } catch (const genou::Error& e) {
    std::cerr << e.what() << "\n";
    return kFail;
  }
  if (g.out.empty()) {
    std::cout << out.str();
  } else {
    genou::write_file_atomic(g.out, out.str());
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and limit-theory checks for generalized Ornstein-Uhlenbeck processes"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--seed", g.seed, "Override the configured seed")->type_name("INT");
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on this)")->type_name("INT");
  app.add_option("--out", g.out, "Output directory (estimate: output file)");

  std::string config;
  auto add_config_cmd = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("config", config, "JSON experiment config")->required();
    return cmd;
  };
  auto* experiment = add_config_cmd("experiment", "Run every task listed in the config");
  auto* simulate = add_config_cmd("simulate", "Simulate a stationary skeleton and write series.csv");
  auto* constants = add_config_cmd("constants", "Monte Carlo limit constants for the configured model");
  auto* verify = add_config_cmd("verify", "Check the scaling and first-arrival identities");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Run an estimator on a series CSV");
  estimate->add_option("input", est.input, "CSV with k,V,H,I columns or a single column")->required();
  estimate->add_option("--column", est.column, "Series column")->check(CLI::IsMember({"V", "H", "I"}));
  estimate->add_option("--method", est.method, "Estimator")
      ->check(CLI::IsMember({"hill", "blocks", "runs", "clusters", "acv"}));
  estimate->add_option("--k", est.k, "Hill order statistics (default n^0.6)");
  estimate->add_option("--threshold-q", est.threshold_q, "Threshold quantile")->check(CLI::Range(0.0, 1.0));
  estimate->add_option("--block-len", est.block_len, "Block length / run gap (default ceil(sqrt n))");
  estimate->add_option("--max-lag", est.max_lag, "Largest lag for acv");
  estimate->add_flag("--mean-correct", est.mean_correct, "Centre the series before acv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  if (*experiment) return run_config(config, g, {});
  if (*simulate) return run_config(config, g, {"simulate"});
  if (*constants) return run_config(config, g, {"constants"});
  if (*verify) return run_config(config, g, {"verify_identities"});
  if (*estimate) return run_estimate(est, g);
  return kUsage;
}
