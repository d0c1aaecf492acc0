#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "genou/experiment.hpp"
#include "genou/series_io.hpp"

using namespace genou;
namespace fs = std::filesystem;

namespace {

const char* kCogarchAlpha1 = R"({
  "model": {"family": "cogarch_cpp", "beta": 1, "c": 1, "lambda_g": 0.36787944117144233, "mu": 1,
            "jump_law": {"type": "deterministic_abs", "z": 1}},
  "tasks": ["verify_identities"],
  "n_paths": 20000,
  "seed": 9
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("genou_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ExperimentConfig quick_config() {
  ExperimentConfig c = parse_config(R"({"model": {"family": "nelson", "lambda": 1, "a": 1, "sigma": 1.4142135623730951},
    "tasks": ["simulate", "constants", "tails"], "sizes": [100000], "n_paths": 2000, "seed": 4,
    "tolerances": {"tail_q": 0.98}})");
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  ExperimentConfig d = parse_config(R"({"model": {"family": "nelson"}, "tasks": ["simulate"]})");
  CHECK(d.h == 1.0);
  CHECK(d.reps == 200);
  CHECK(d.seed == 1);
  CHECK(d.subgrid == kDefaultSubgrid);
  CHECK(d.tolerances.z == 3.0);
  CHECK(std::holds_alternative<Nelson>(d.model));
  CHECK(effective_series_length(d) == 100000);
  d.series_length = 500;
  CHECK(effective_series_length(d) == 500);

  ExperimentConfig c = parse_config(kCogarchAlpha1);
  REQUIRE(std::holds_alternative<CogarchCPP>(c.model));
  CHECK(std::holds_alternative<DeterministicAbs>(std::get<CogarchCPP>(c.model).jump_law));
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));

  SUBCASE("validation names the field") {
    try {
      parse_config(R"({"model": {"family": "nelson"}, "tasks": ["simulate"], "h": -1})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("h: must be > 0") != std::string::npos);
    }
  }
  SUBCASE("every violation is listed") {
    try {
      parse_config(R"({"model": {"family": "nelson", "sigma": 0}, "tasks": ["bogus"], "reps": 0, "extra": 1})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      std::string m = e.what();
      CHECK(m.find("4 problems") != std::string::npos);
      CHECK(m.find("extra: unknown key") != std::string::npos);
      CHECK(m.find("reps") != std::string::npos);
      CHECK(m.find("bogus") != std::string::npos);
      CHECK(m.find("model:") != std::string::npos);
    }
  }
  SUBCASE("syntax errors carry a position") {
    try {
      parse_config("{\n  \"h\": 1,\n  \"reps\": ]\n}");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3, column") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse_config(R"({"model": {"family": "levy"}, "tasks": ["simulate"]})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"family": "nelson"}, "tasks": ["simulate"], "workers": 0})"),
                  ValidationError);
}

TEST_CASE("series csv round trip") {
  RandomStream r(3);
  SkeletonSeries s = simulate_skeleton(Nelson{}, 0.5, 50, 4, r);
  std::stringstream io;
  write_series_csv(io, s);
  std::string text = io.str();
  CHECK(text.find("# model_hash: " + s.model_id) != std::string::npos);
  CHECK(text.find("# convention: continuous") != std::string::npos);
  SkeletonSeries t = read_series_csv(io);
  CHECK((t.V == s.V).all());
  CHECK((t.H == s.H).all());
  CHECK((t.I == s.I).all());
  CHECK(t.h == 0.5);

  std::istringstream single("x\n1.5\n2.5\n");
  SkeletonSeries u = read_series_csv(single);
  CHECK(u.V.size() == 2);
  CHECK(u.H.size() == 0);
  std::istringstream bad("k,V,H,I\n0,abc,,\n");
  CHECK_THROWS_AS(read_series_csv(bad), ParseError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("experiments are reproducible and independent of the worker count") {
  ExperimentConfig c = quick_config();
  ExperimentReport a = run_experiment(c);
  c.workers = 3;
  ExperimentReport b = run_experiment(c);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(constants_csv(a) == constants_csv(b));
  CHECK(a.rows.size() >= 10);
  CHECK(report_csv(a).rfind("task,target_name,theory_value,empirical_value,tolerance,pass,anchor,seed\n", 0) == 0);

  fs::path dir = scratch("write");
  auto written = write_report(a, c, dir.string());
  CHECK(written.size() == 4);
  CHECK(slurp(dir / "report.csv") == report_csv(a));
  CHECK(parse_config(slurp(dir / "config.json")) == c);
  std::ifstream sf(dir / "series.csv");
  CHECK(read_series_csv(sf).V.size() == 100001);
  fs::remove_all(dir);
}

TEST_CASE("identity checks on the alpha = 1 compound Poisson model") {
  ExperimentReport r = run_experiment(parse_config(kCogarchAlpha1));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].target_name == "h_scaling_identity(h=2)");
  CHECK(r.rows[1].target_name == "first_arrival_identity");
  CHECK(r.all_pass());
  CHECK(r.constants.size() == 4);
}

TEST_CASE("a failing task leaves a partial report") {
  ExperimentConfig c = parse_config(kCogarchAlpha1);
  c.tasks = {"constants", "integrated_limit"};
  c.n_paths = 500;
  c.sizes = {2000};
  ExperimentReport partial;
  CHECK_THROWS_AS(run_experiment(c, &partial), Error);
  CHECK(partial.failed);
  CHECK_FALSE(partial.all_pass());
  CHECK(partial.rows.back().task == "integrated_limit");
  CHECK(partial.rows.back().target_name.rfind("FAILED", 0) == 0);
  CHECK(partial.rows.size() > 1);
}

TEST_CASE("plot artifacts") {
  fs::path dir = scratch("plots");
  ExperimentReport empty;
  CHECK(emit_plots(empty, dir.string()).empty());
  CHECK_FALSE(fs::exists(dir));

  ExperimentReport r;
  r.rows.push_back({"acf_rates", "rate_slope_acv_V", -0.5, -0.5, 0.1, true, "x"});
  CHECK_THROWS_AS(emit_plots(r, dir.string()), MissingArtifact);
  for (auto st : {RateStatistic::acv_V, RateStatistic::acf_I}) {
    RateResult rr;
    rr.statistic = st;
    rr.n_list = {1000, 10000, 100000};
    rr.iqr = {0.1, 0.03, 0.01};
    rr.fit.slope = -0.5;
    r.artifacts.rates.push_back(rr);
  }
  auto files = emit_plots(r, dir.string());
  REQUIRE(files.size() == 2);
  CHECK(fs::path(files[0]).filename() == "rate_acv_V_lag1.svg");
  CHECK(fs::path(files[1]).filename() == "rate_acf_I_lag1.svg");
  CHECK(slurp(files[0]).rfind("<svg", 0) == 0);

  Eigen::ArrayXd sample = Eigen::ArrayXd::LinSpaced(1001, 0.0, 10.0);
  auto [lo, hi] = cdf_overlay_range(sample);
  CHECK(lo == doctest::Approx(0.1));
  CHECK(hi == doctest::Approx(9.9));

  ExperimentConfig c = quick_config();
  c.plots = true;
  c.tasks = {"tails"};
  ExperimentReport t = run_experiment(c);
  auto all = write_report(t, c, dir.string());
  CHECK(fs::exists(dir / "hill_V.svg"));
  CHECK(all.size() == 5);
  fs::remove_all(dir);
}
