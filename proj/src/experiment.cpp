#include "genou/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "genou/extreme_stats.hpp"
#include "genou/limit_checks.hpp"
#include "genou/series_io.hpp"

namespace genou {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Config parsing

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) errors_.push_back(path + k + ": unknown key");
  }

  double number(const json& obj, const std::string& path, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      errors_.push_back(path + key + ": expected a number");
      return dflt;
    }
    return v.get<double>();
  }

  long integer(const json& obj, const std::string& path, const char* key, long dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(path + key + ": expected an integer");
      return dflt;
    }
    return v.get<long>();
  }

  std::string string(const json& obj, const std::string& path, const char* key, const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      errors_.push_back(path + key + ": expected a string");
      return dflt;
    }
    return v.get<std::string>();
  }

  void positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) errors_.push_back(field + ": must be > 0");
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  std::vector<std::string>& errors_;
};

JumpLaw read_jump_law(const json& j, Reader& r) {
  const std::string p = "model.jump_law.";
  if (!j.is_object()) {
    r.errors().push_back("model.jump_law: expected an object");
    return TwoPoint{};
  }
  std::string type = r.string(j, p, "type", "two_point");
  if (type == "two_point") {
    r.allow_only(j, p, {"type", "z"});
    return TwoPoint{r.number(j, p, "z", 1.0)};
  }
  if (type == "gaussian") {
    r.allow_only(j, p, {"type", "sd"});
    return GaussianJump{r.number(j, p, "sd", 1.0)};
  }
  if (type == "deterministic_abs") {
    r.allow_only(j, p, {"type", "z"});
    return DeterministicAbs{r.number(j, p, "z", 1.0)};
  }
  r.errors().push_back("model.jump_law.type: unknown jump law '" + type + "'");
  return TwoPoint{};
}

LevyModel read_model(const json& j, Reader& r) {
  const std::string p = "model.";
  if (!j.is_object()) {
    r.errors().push_back("model: expected an object");
    return Nelson{};
  }
  std::string family = r.string(j, p, "family", "");
  LevyModel model;
  if (family == "nelson") {
    r.allow_only(j, p, {"family", "lambda", "a", "sigma"});
    Nelson m;
    m.lambda = r.number(j, p, "lambda", m.lambda);
    m.a = r.number(j, p, "a", m.a);
    m.sigma = r.number(j, p, "sigma", m.sigma);
    model = m;
  } else if (family == "cogarch_cpp") {
    r.allow_only(j, p, {"family", "beta", "c", "lambda_g", "mu", "jump_law"});
    CogarchCPP m;
    m.beta = r.number(j, p, "beta", m.beta);
    m.c = r.number(j, p, "c", m.c);
    m.lambda_g = r.number(j, p, "lambda_g", m.lambda_g);
    m.mu = r.number(j, p, "mu", m.mu);
    if (j.contains("jump_law")) m.jump_law = read_jump_law(j.at("jump_law"), r);
    model = m;
  } else if (family == "brownian_exponent") {
    r.allow_only(j, p, {"family", "m", "sigma", "eta_rate"});
    BrownianExponent m;
    m.m = r.number(j, p, "m", m.m);
    m.sigma = r.number(j, p, "sigma", m.sigma);
    m.eta_rate = r.number(j, p, "eta_rate", m.eta_rate);
    model = m;
  } else {
    r.errors().push_back("model.family: expected nelson, cogarch_cpp or brownian_exponent");
    return Nelson{};
  }
  try {
    validate(model);
  } catch (const InvalidConfig& e) {
    r.errors().push_back(std::string("model: ") + e.what());
  }
  return model;
}

Tolerances read_tolerances(const json& j, Reader& r) {
  const std::string p = "tolerances.";
  Tolerances t;
  if (!j.is_object()) {
    r.errors().push_back("tolerances: expected an object");
    return t;
  }
  r.allow_only(j, p, {"z", "tail_q", "tail_ratio_rel", "hill_rel", "theta_q", "block_len", "ks", "slope", "skew",
                      "kurtosis", "stable_slope"});
  t.z = r.number(j, p, "z", t.z);
  t.tail_q = r.number(j, p, "tail_q", t.tail_q);
  t.tail_ratio_rel = r.number(j, p, "tail_ratio_rel", t.tail_ratio_rel);
  t.hill_rel = r.number(j, p, "hill_rel", t.hill_rel);
  t.theta_q = r.number(j, p, "theta_q", t.theta_q);
  t.block_len = r.integer(j, p, "block_len", t.block_len);
  t.ks = r.number(j, p, "ks", t.ks);
  t.slope = r.number(j, p, "slope", t.slope);
  t.skew = r.number(j, p, "skew", t.skew);
  t.kurtosis = r.number(j, p, "kurtosis", t.kurtosis);
  t.stable_slope = r.number(j, p, "stable_slope", t.stable_slope);
  for (auto [name, v] : {std::pair{"z", t.z}, {"tail_ratio_rel", t.tail_ratio_rel}, {"hill_rel", t.hill_rel},
                         {"ks", t.ks}, {"slope", t.slope}, {"skew", t.skew}, {"kurtosis", t.kurtosis},
                         {"stable_slope", t.stable_slope}})
    r.positive(v, p + name);
  if (!(t.tail_q > 0.0 && t.tail_q < 1.0)) r.errors().push_back(p + "tail_q: must lie in (0, 1)");
  if (!(t.theta_q > 0.0 && t.theta_q < 1.0)) r.errors().push_back(p + "theta_q: must lie in (0, 1)");
  if (t.block_len < 1) r.errors().push_back(p + "block_len: must be >= 1");
  return t;
}

json model_json(const LevyModel& model) {
  struct {
    json operator()(const Nelson& m) const {
      return {{"family", "nelson"}, {"lambda", m.lambda}, {"a", m.a}, {"sigma", m.sigma}};
    }
    json operator()(const BrownianExponent& m) const {
      return {{"family", "brownian_exponent"}, {"m", m.m}, {"sigma", m.sigma}, {"eta_rate", m.eta_rate}};
    }
    json operator()(const CogarchCPP& m) const {
      json law;
      if (const auto* j = std::get_if<TwoPoint>(&m.jump_law)) law = {{"type", "two_point"}, {"z", j->z}};
      if (const auto* j = std::get_if<GaussianJump>(&m.jump_law)) law = {{"type", "gaussian"}, {"sd", j->sd}};
      if (const auto* j = std::get_if<DeterministicAbs>(&m.jump_law))
        law = {{"type", "deterministic_abs"}, {"z", j->z}};
      return {{"family", "cogarch_cpp"}, {"beta", m.beta}, {"c", m.c},        {"lambda_g", m.lambda_g},
              {"mu", m.mu},              {"jump_law", law}};
    }
  } visitor;
  return std::visit(visitor, model);
}

json config_json(const ExperimentConfig& c) {
  const Tolerances& t = c.tolerances;
  return {{"model", model_json(c.model)},
          {"h", c.h},
          {"sizes", c.sizes},
          {"series_length", c.series_length},
          {"reps", c.reps},
          {"seed", c.seed},
          {"tasks", c.tasks},
          {"output_dir", c.output_dir},
          {"workers", c.workers},
          {"subgrid", c.subgrid},
          {"n_paths", c.n_paths},
          {"dt", c.dt},
          {"plots", c.plots},
          {"tolerances",
           {{"z", t.z},
            {"tail_q", t.tail_q},
            {"tail_ratio_rel", t.tail_ratio_rel},
            {"hill_rel", t.hill_rel},
            {"theta_q", t.theta_q},
            {"block_len", t.block_len},
            {"ks", t.ks},
            {"slope", t.slope},
            {"skew", t.skew},
            {"kurtosis", t.kurtosis},
            {"stable_slope", t.stable_slope}}}};
}

// ---------------------------------------------------------------------------
// Running

std::string fmt(double x) { return std::isnan(x) ? std::string("nan") : format_double(x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double closed_form_alpha(const LevyModel& model) {
  if (const auto* m = std::get_if<Nelson>(&model)) return 1.0 + 2.0 * m->lambda / (m->sigma * m->sigma);
  if (const auto* m = std::get_if<BrownianExponent>(&model)) return 2.0 * m->m / (m->sigma * m->sigma);
  return kNaN;
}

std::uint64_t task_tag(const std::string& task) {
  auto it = std::find(kTaskNames.begin(), kTaskNames.end(), task);
  return static_cast<std::uint64_t>(it - kTaskNames.begin());
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, ExperimentReport& rep) : cfg_(cfg), rep_(rep) {}

  void run(const std::string& task) {
    task_ = task;
    if (task == "simulate") simulate();
    else if (task == "constants") constants();
    else if (task == "verify_identities") verify_identities();
    else if (task == "tails") tails();
    else if (task == "extremes") extremes();
    else if (task == "acf_rates") acf_rates();
    else if (task == "integrated_limit") integrated_limit();
    else throw InvalidConfig("unknown task '" + task + "'");
  }

 private:
  void row(const std::string& target, double theory, double empirical, double tol, bool pass,
           const std::string& anchor) {
    rep_.rows.push_back({task_, target, theory, empirical, tol, pass, anchor});
  }

  double alpha() {
    if (!alpha_) alpha_ = find_alpha(cfg_.model);
    return *alpha_;
  }

  MonteCarloOptions mc(std::uint64_t tag) const {
    MonteCarloOptions o;
    o.n_paths = cfg_.n_paths;
    o.dt = cfg_.dt;
    o.seed = derive_seed(cfg_.seed, {100, tag});
    o.workers = cfg_.workers;
    return o;
  }

  ReplicationOptions replication() const {
    ReplicationOptions o;
    o.seed = derive_seed(cfg_.seed, {200, task_tag(task_)});
    o.workers = cfg_.workers;
    o.h = cfg_.h;
    o.subgrid = cfg_.subgrid;
    return o;
  }

  // Constants are cached by label and always use the same derived seed, so the
  // value does not depend on which task asks first.
  const TheoryConstant& constant(const std::string& key, const std::function<TheoryConstant()>& make) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    TheoryConstant c = make();
    c.label = key;
    rep_.constants.push_back(c);
    return cache_.emplace(key, std::move(c)).first->second;
  }

  const TheoryConstant& sup_exponent(double h) {
    return constant("sup_exponent(h=" + fmt(h) + ")",
                    [&] { return mc_sup_exponent(cfg_.model, alpha(), h, mc(1)); });
  }
  const TheoryConstant& kappa() {
    return constant("frechet_constant", [&] { return frechet_constant(cfg_.model, alpha(), mc(2)); });
  }
  const TheoryConstant& theta_V() {
    return constant("extremal_index_V(h=" + fmt(cfg_.h) + ")",
                    [&] { return extremal_index_V(cfg_.model, alpha(), cfg_.h, mc(3)); });
  }
  const TheoryConstant& tail_I() {
    return constant("tail_constant_I(h=" + fmt(cfg_.h) + ")",
                    [&] { return tail_constant_I(cfg_.model, alpha(), cfg_.h, mc(4)); });
  }
  const TheoryConstant& tail_C() {
    return constant("tail_scale_C", [&] {
      TailScaleOptions o;
      o.n = std::max<long>(effective_series_length(cfg_), 100000);
      o.seed = derive_seed(cfg_.seed, {100, 5});
      return tail_scale_C(cfg_.model, alpha(), o);
    });
  }

  const SkeletonSeries& skeleton() {
    if (!rep_.series) {
      RandomStream rng(derive_seed(cfg_.seed, {300}));
      rep_.series = simulate_skeleton(cfg_.model, cfg_.h, effective_series_length(cfg_), cfg_.subgrid, rng);
    }
    return *rep_.series;
  }

  void simulate() {
    const SkeletonSeries& s = skeleton();
    double min_v = s.V.minCoeff();
    row("V_positive", 0.0, min_v, 0.0, min_v > 0.0, "plumbing");
    long bad = 0;
    for (Eigen::Index k = 0; k < s.H.size(); ++k)
      if (s.H[k] < std::max(s.V[k], s.V[k + 1])) ++bad;
    row("H_dominates_endpoints", 0.0, static_cast<double>(bad), 0.0, bad == 0, "plumbing");
    Eigen::Index half = s.H.size() / 2;
    if (half >= 10) {
      double d = ks_two_sample(s.V.segment(1, half), s.V.tail(half));
      double p = ks_two_sample_pvalue(d, static_cast<double>(half), static_cast<double>(half));
      row("stationarity_ks_pvalue", 0.01, p, 0.01, p >= 0.01, "stationary solution");
    }
  }

  void constants() {
    double a = alpha();
    double closed = closed_form_alpha(cfg_.model);
    double psi = laplace_exponent(cfg_.model, a);
    if (std::isnan(closed))
      row("psi_at_alpha", 0.0, psi, 1e-10, std::abs(psi) <= 1e-10, "tail index root");
    else
      row("alpha", closed, a, 1e-10, std::abs(closed - a) <= 1e-10, "tail index root");

    const auto& S = sup_exponent(cfg_.h);
    row("sup_exponent", 1.0, S.value, kNaN, S.value >= 1.0, "block-maximum tail constant");
    const auto& S1 = sup_exponent(1.0);
    const auto& K = kappa();
    row("frechet_constant", S1.value, K.value, kNaN, K.value >= 0.0 && K.value <= S1.value,
        "Frechet limit of running maxima");
    const auto& th = theta_V();
    row("extremal_index_V", 1.0, th.value, cfg_.tolerances.z * th.std_error,
        th.value > 0.0 && th.value <= 1.0 + cfg_.tolerances.z * th.std_error, "extremal index function");
    const auto& ti = tail_I();
    row("tail_constant_I", 0.0, ti.value, kNaN, ti.value > 0.0, "increment tail constant");
    const auto& C = tail_C();
    row("tail_scale_C", 0.0, C.value, kNaN, C.value > 0.0, "Pareto-like stationary tail");
  }

  void verify_identities() {
    double a = alpha();
    double hb = cfg_.h != 1.0 ? cfg_.h : 2.0;
    IdentityCheck b1 = verify_h_scaling_identity(cfg_.model, a, hb, mc(6));
    b1.lhs.label = "h_scaling_lhs(h=" + fmt(hb) + ")";
    b1.rhs.label = "h_scaling_rhs(h=" + fmt(hb) + ")";
    rep_.constants.push_back(b1.lhs);
    rep_.constants.push_back(b1.rhs);
    row("h_scaling_identity(h=" + fmt(hb) + ")", b1.rhs.value, b1.lhs.value, cfg_.tolerances.z,
        std::abs(b1.z_score) <= cfg_.tolerances.z, "h-scaling identity of the cluster functional");
    if (const auto* m = std::get_if<CogarchCPP>(&cfg_.model)) {
      IdentityCheck l45 = verify_first_arrival_identity(*m, a, mc(7));
      rep_.constants.push_back(l45.lhs);
      rep_.constants.push_back(l45.rhs);
      row("first_arrival_identity", l45.rhs.value, l45.lhs.value, cfg_.tolerances.z,
          std::abs(l45.z_score) <= cfg_.tolerances.z, "first-arrival identity for compound Poisson drivers");
    }
  }

  void tails() {
    const SkeletonSeries& s = skeleton();
    const Tolerances& t = cfg_.tolerances;
    Eigen::ArrayXd V = s.V.tail(s.size());
    double a = alpha();

    const auto& S = sup_exponent(cfg_.h);
    double rH = tail_ratio(s.H, V, t.tail_q, TailTransform::identity);
    row("tail_ratio_H_V", S.value, rH, t.tail_ratio_rel, std::abs(rH / S.value - 1.0) <= t.tail_ratio_rel,
        "block-maximum tail equivalence");

    const auto& TI = tail_I();
    double rI = tail_ratio(s.I, V, t.tail_q, TailTransform::square);
    row("tail_ratio_I_V2", TI.value, rI, t.tail_ratio_rel, std::abs(rI / TI.value - 1.0) <= t.tail_ratio_rel,
        "increment tail equivalence");

    long k = default_hill_k(V.size());
    TailEstimate hill = hill_estimator(V, k);
    row("hill_alpha_V", a, hill.alpha_hat, t.hill_rel, std::abs(hill.alpha_hat / a - 1.0) <= t.hill_rel,
        "Pareto-like stationary tail");

    HillPlotData hp;
    hp.name = "V";
    hp.reference = a;
    std::vector<long> ks;
    double kmax = std::max(20.0, static_cast<double>(V.size()) / 20.0);
    for (int i = 0; i <= 30; ++i) {
      long kk = std::lround(10.0 * std::pow(kmax / 10.0, i / 30.0));
      if (kk >= 2 && kk < V.size() && (ks.empty() || kk > ks.back())) ks.push_back(kk);
    }
    for (const auto& e : hill_path(V, ks)) {
      hp.k.push_back(static_cast<double>(e.k_order));
      hp.alpha_hat.push_back(e.alpha_hat);
    }
    rep_.artifacts.hill.push_back(std::move(hp));
  }

  void extremes() {
    const SkeletonSeries& s = skeleton();
    const Tolerances& t = cfg_.tolerances;
    const auto& th = theta_V();
    double u = quantile(s.H, t.theta_q);
    ExtremalIndexEstimate blocks = extremal_index_blocks(s.H, u, t.block_len, derive_seed(cfg_.seed, {400}));
    double se = std::hypot(blocks.se, th.std_error);
    row("theta_blocks_H", th.value, blocks.theta_hat, t.z * se, std::abs(blocks.theta_hat - th.value) <= t.z * se,
        "extremal index function");

    ExtremalIndexEstimate runs = extremal_index_runs(s.H, u, t.block_len, derive_seed(cfg_.seed, {401}));
    double se_r = std::hypot(blocks.se, runs.se);
    row("theta_runs_vs_blocks", blocks.theta_hat, runs.theta_hat, t.z * se_r,
        std::abs(runs.theta_hat - blocks.theta_hat) <= t.z * se_r, "plumbing");

    ClusterSizes cl = cluster_size_distribution(s.H, u, t.block_len);
    double inv = 1.0 / th.value, inv_se = th.std_error / (th.value * th.value);
    double se_c = std::hypot(cl.se, inv_se);
    row("mean_cluster_size", inv, cl.mean_size, t.z * se_c, std::abs(cl.mean_size - inv) <= t.z * se_c,
        "exceedance clusters of block maxima");

    const auto& C = tail_C();
    const auto& K = kappa();
    ReplicationOptions ro = replication();
    auto pm = partial_maxima_check(cfg_.model, alpha(), C.value, K.value, cfg_.sizes, cfg_.reps, ro);
    for (std::size_t i = 0; i < pm.size(); ++i) {
      bool last = i + 1 == pm.size();
      row("partial_maxima_ks(n=" + std::to_string(pm[i].n) + ")", 0.0, pm[i].ks, last ? t.ks : kNaN,
          last ? pm[i].ks <= t.ks : true, "Frechet limit of running maxima");
    }
    rep_.artifacts.cdfs.push_back(
        {"M(n=" + std::to_string(pm.back().n) + ")", pm.back().normalized, K.value, alpha()});
  }

  void acf_rates() {
    double a = alpha();
    ReplicationOptions ro = replication();
    RateStatistic sv = a > 2.0 ? RateStatistic::acv_V : RateStatistic::acf_V;
    RateStatistic si = 2.0 * a > 2.0 ? RateStatistic::acv_I : RateStatistic::acf_I;
    for (RateStatistic st : {sv, si}) {
      RateResult r = rate_diagnostic(cfg_.model, st, 1, cfg_.sizes, cfg_.reps, ro);
      row("rate_slope_" + to_string(st), r.expected, r.fit.slope, cfg_.tolerances.slope,
          std::abs(r.fit.slope - r.expected) <= cfg_.tolerances.slope, "sample autocovariance rate regimes");
      rep_.artifacts.rates.push_back(std::move(r));
    }
  }

  void integrated_limit() {
    const Tolerances& t = cfg_.tolerances;
    IntegratedLimitTolerances tol{t.skew, t.kurtosis, t.ks, t.hill_rel, t.stable_slope};
    std::vector<double> tl(cfg_.sizes.begin(), cfg_.sizes.end());
    auto r = integrated_limit_check(cfg_.model, alpha(), tl, cfg_.reps, replication(), tol);
    const auto& last = r.rows.back();
    const std::string anchor = "integrated process limit regimes";
    row("symmetric_driver", 1.0, r.symmetric_driver ? 1.0 : 0.0, kNaN, true, "symmetry condition");
    if (r.regime == "normal") {
      row("skewness", 0.0, last.skewness, t.skew, r.gate_skew, anchor);
      row("excess_kurtosis", 0.0, last.excess_kurtosis, t.kurtosis, r.gate_kurtosis, anchor);
      row("ks_normal", 0.0, last.ks_normal, t.ks, r.gate_ks, anchor);
    } else {
      row("hill_normalized_sum", 2.0 * r.alpha, last.hill, t.hill_rel, r.gate_hill, anchor);
      row("iqr_scaling_slope", r.expected_slope, r.slope, t.stable_slope, r.gate_slope, anchor);
    }
  }

  const ExperimentConfig& cfg_;
  ExperimentReport& rep_;
  std::string task_;
  std::optional<double> alpha_;
  std::map<std::string, TheoryConstant> cache_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    long line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < document.size(); ++i) {
      if (document[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("config parse error at line 1, column 1: top level must be an object");

  std::vector<std::string> errors;
  Reader r(errors);
  r.allow_only(j, "", {"model", "h", "sizes", "series_length", "reps", "seed", "tasks", "output_dir", "workers",
                       "subgrid", "n_paths", "dt", "plots", "tolerances"});
  ExperimentConfig c;
  if (j.contains("model"))
    c.model = read_model(j.at("model"), r);
  else
    errors.push_back("model: required");
  c.h = r.number(j, "", "h", c.h);
  r.positive(c.h, "h");

  if (j.contains("sizes")) {
    const json& s = j.at("sizes");
    if (!s.is_array() || s.empty()) {
      errors.push_back("sizes: expected a non-empty array of integers");
    } else {
      c.sizes.clear();
      for (const auto& v : s) {
        if (!v.is_number_integer() || v.get<long>() < 1) {
          errors.push_back("sizes: entries must be integers >= 1");
          break;
        }
        c.sizes.push_back(v.get<long>());
      }
    }
  }
  c.series_length = r.integer(j, "", "series_length", c.series_length);
  if (c.series_length < 0) errors.push_back("series_length: must be >= 0");
  c.reps = r.integer(j, "", "reps", c.reps);
  if (c.reps < 1) errors.push_back("reps: must be >= 1");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (s.is_number_unsigned())
      c.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer())
      errors.push_back("seed: must be >= 0");
    else
      errors.push_back("seed: expected an integer");
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    if (!t.is_array()) {
      errors.push_back("tasks: expected an array of task names");
    } else {
      for (const auto& v : t) {
        if (!v.is_string()) {
          errors.push_back("tasks: entries must be strings");
          continue;
        }
        std::string name = v.get<std::string>();
        if (std::find(kTaskNames.begin(), kTaskNames.end(), name) == kTaskNames.end())
          errors.push_back("tasks: unknown task '" + name + "'");
        c.tasks.push_back(name);
      }
    }
  }
  if (c.tasks.empty()) errors.push_back("tasks: must list at least one task");
  c.output_dir = r.string(j, "", "output_dir", c.output_dir);
  long workers = r.integer(j, "", "workers", c.workers);
  if (workers < 1) errors.push_back("workers: must be >= 1");
  c.workers = static_cast<unsigned>(std::max(workers, 1L));
  long sub = r.integer(j, "", "subgrid", c.subgrid);
  if (sub < 1) errors.push_back("subgrid: must be >= 1");
  c.subgrid = static_cast<int>(std::max(sub, 1L));
  c.n_paths = r.integer(j, "", "n_paths", c.n_paths);
  if (c.n_paths < 2) errors.push_back("n_paths: must be >= 2");
  c.dt = r.number(j, "", "dt", c.dt);
  r.positive(c.dt, "dt");
  if (j.contains("plots")) {
    if (j.at("plots").is_boolean())
      c.plots = j.at("plots").get<bool>();
    else
      errors.push_back("plots: expected true or false");
  }
  if (j.contains("tolerances")) c.tolerances = read_tolerances(j.at("tolerances"), r);

  if (!errors.empty()) {
    std::string msg = "invalid config (" + std::to_string(errors.size()) + " problem" +
                      (errors.size() == 1 ? "" : "s") + "):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return config_json(a) == config_json(b); }

long effective_series_length(const ExperimentConfig& config) {
  if (config.series_length > 0) return config.series_length;
  return *std::max_element(config.sizes.begin(), config.sizes.end());
}

bool ExperimentReport::all_pass() const {
  return !failed && std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

ExperimentReport run_experiment(const ExperimentConfig& config, ExperimentReport* partial) {
  ExperimentReport rep;
  rep.seed = config.seed;
  Runner runner(config, rep);
  for (const auto& task : config.tasks) {
    try {
      runner.run(task);
    } catch (const std::exception& e) {
      rep.failed = true;
      rep.rows.push_back({task, std::string("FAILED: ") + e.what(), kNaN, kNaN, kNaN, false, "plumbing"});
      if (partial) *partial = rep;
      throw Error("task " + task + ": " + e.what());
    }
  }
  if (partial) *partial = rep;
  return rep;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream s;
  s << "task,target_name,theory_value,empirical_value,tolerance,pass,anchor,seed\n";
  for (const auto& r : report.rows) {
    s << csv_field(r.task) << ',' << csv_field(r.target_name) << ',' << fmt(r.theory_value) << ','
      << fmt(r.empirical_value) << ',' << fmt(r.tolerance) << ',' << (r.pass ? "true" : "false") << ','
      << csv_field(r.anchor) << ',' << report.seed << '\n';
  }
  return s.str();
}

std::string constants_csv(const ExperimentReport& report) {
  std::ostringstream s;
  s << "label,value,se,n_paths,horizon,dt,extrapolated,warnings,seed\n";
  for (const auto& c : report.constants) {
    std::string w;
    for (const auto& x : c.warnings) w += (w.empty() ? "" : "; ") + x;
    s << csv_field(c.label) << ',' << fmt(c.value) << ',' << fmt(c.std_error) << ',' << c.n_paths << ','
      << fmt(c.horizon) << ',' << fmt(c.dt) << ',' << fmt(c.extrapolated) << ',' << csv_field(w) << ','
      << report.seed << '\n';
  }
  return s.str();
}

std::vector<std::string> write_report(const ExperimentReport& report, const ExperimentConfig& config,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    std::string path = (fs::path(dir) / name).string();
    write_file_atomic(path, content);
    written.push_back(path);
  };
  put("report.csv", report_csv(report));
  put("constants.csv", constants_csv(report));
  put("config.json", serialize_config(config));
  if (report.series) {
    std::ostringstream s;
    write_series_csv(s, *report.series);
    put("series.csv", s.str());
  }
  if (config.plots) {
    auto plots = emit_plots(report, dir);
    written.insert(written.end(), plots.begin(), plots.end());
  }
  return written;
}

std::vector<std::string> emit_plots(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  if (report.rows.empty()) return written;
  auto has_task = [&](const char* t) {
    return std::any_of(report.rows.begin(), report.rows.end(),
                       [&](const ReportRow& r) { return r.task == t && r.target_name.rfind("FAILED", 0) != 0; });
  };
  const auto& a = report.artifacts;
  if (has_task("tails") && a.hill.empty()) throw MissingArtifact("tails rows present but no Hill plot data");
  if (has_task("acf_rates") && a.rates.empty()) throw MissingArtifact("acf_rates rows present but no regressions");
  if (has_task("extremes") && a.cdfs.empty()) throw MissingArtifact("extremes rows present but no maxima sample");

  auto put = [&](const std::string& name, const std::string& svg) {
    std::string path = (fs::path(dir) / name).string();
    write_file_atomic(path, svg);
    written.push_back(path);
  };
  for (const auto& h : a.hill) put("hill_" + h.name + ".svg", hill_plot_svg(h));
  for (const auto& r : a.rates) put(rate_plot_name(r) + ".svg", rate_plot_svg(r));
  for (std::size_t i = 0; i < a.cdfs.size(); ++i) put("cdf_overlay_" + std::to_string(i) + ".svg", cdf_overlay_svg(a.cdfs[i]));
  return written;
}

}  // namespace genou
