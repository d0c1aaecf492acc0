#include "genou/limit_checks.hpp"

#include <algorithm>
#include <cmath>

#include "genou/genou_sim.hpp"
#include "genou/theory_constants.hpp"

namespace genou {

std::string to_string(RateStatistic s) {
  switch (s) {
    case RateStatistic::acv_V: return "acv_V";
    case RateStatistic::acv_I: return "acv_I";
    case RateStatistic::acf_V: return "acf_V";
    case RateStatistic::acf_I: return "acf_I";
  }
  return "?";
}

RateStatistic rate_statistic_from_string(const std::string& s) {
  if (s == "acv_V") return RateStatistic::acv_V;
  if (s == "acv_I") return RateStatistic::acv_I;
  if (s == "acf_V") return RateStatistic::acf_V;
  if (s == "acf_I") return RateStatistic::acf_I;
  throw InvalidConfig("unknown rate statistic '" + s + "'");
}

double expected_rate_slope(RateStatistic s, double alpha) {
  // V has tail index alpha, I has 2 alpha; the autocovariance of a series with
  // tail index a fluctuates like n^{2/a - 1} below a = 4 and like n^{-1/2} above.
  bool is_V = s == RateStatistic::acv_V || s == RateStatistic::acf_V;
  double a = is_V ? alpha : 2.0 * alpha;
  if (a > 4.0) return -0.5;
  bool acf = s == RateStatistic::acf_V || s == RateStatistic::acf_I;
  if (acf && a < 2.0) return 0.0;
  return 2.0 / a - 1.0;
}

RateResult rate_diagnostic_series(const SeriesGenerator& gen, RateStatistic statistic, long lag,
                                  const std::vector<long>& n_list, long n_reps, const ReplicationOptions& opt) {
  if (n_list.size() < 4) throw InvalidConfig("rate_diagnostic: need at least 4 sample sizes");
  auto [mn, mx] = std::minmax_element(n_list.begin(), n_list.end());
  if (*mn < 1 || static_cast<double>(*mx) < 100.0 * static_cast<double>(*mn))
    throw InvalidConfig("rate_diagnostic: sample sizes must span at least two decades");
  if (n_reps < 200) throw InvalidConfig("rate_diagnostic: need n_reps >= 200");
  if (lag < 0 || 2 * lag >= *mn) throw InvalidConfig("rate_diagnostic: lag must be below n/2");

  const bool acf = statistic == RateStatistic::acf_V || statistic == RateStatistic::acf_I;
  const std::size_t cells = n_list.size() * static_cast<std::size_t>(n_reps);
  auto values = parallel_map(cells, opt.workers, [&](std::size_t c) {
    long n = n_list[c / n_reps];
    auto rep = static_cast<std::uint64_t>(c % n_reps);
    RandomStream rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(n), rep}));
    Eigen::ArrayXd x = gen(n, rng);
    double g = acv_at(x, lag);
    return acf ? g / acv_at(x, 0) : g;
  });

  RateResult r;
  r.statistic = statistic;
  r.lag = lag;
  r.n_list = n_list;
  std::size_t largest = static_cast<std::size_t>(mx - n_list.begin());
  double ref = 0.0;
  for (long k = 0; k < n_reps; ++k) ref += values[largest * n_reps + k];
  r.gamma_ref = ref / static_cast<double>(n_reps);

  Eigen::ArrayXd logn(n_list.size()), logiqr(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    Eigen::ArrayXd centred(n_reps);
    for (long k = 0; k < n_reps; ++k) centred[k] = values[i * n_reps + k] - r.gamma_ref;
    r.iqr.push_back(iqr(centred));
    logn[i] = std::log(static_cast<double>(n_list[i]));
    logiqr[i] = std::log(r.iqr.back());
  }
  r.fit = ols_fit(logn, logiqr);
  return r;
}

RateResult rate_diagnostic(const LevyModel& model, RateStatistic statistic, long lag,
                           const std::vector<long>& n_list, long n_reps, const ReplicationOptions& opt) {
  const bool use_V = statistic == RateStatistic::acv_V || statistic == RateStatistic::acf_V;
  SeriesGenerator gen = [&](long n, RandomStream& rng) -> Eigen::ArrayXd {
    SkeletonSeries s = simulate_skeleton(model, opt.h, n, opt.subgrid, rng);
    if (use_V) return s.V.tail(n);
    return s.I;
  };
  RateResult r = rate_diagnostic_series(gen, statistic, lag, n_list, n_reps, opt);
  r.expected = expected_rate_slope(statistic, find_alpha(model));
  return r;
}

double frechet_cdf(double x, double kappa, double alpha) {
  return x > 0.0 ? std::exp(-kappa * std::pow(x, -alpha)) : 0.0;
}

std::vector<PartialMaximaRow> partial_maxima_check(const LevyModel& model, double alpha, double C, double kappa,
                                                   const std::vector<long>& n_list, long n_reps,
                                                   const ReplicationOptions& opt) {
  if (n_reps < 2) throw InvalidConfig("partial_maxima_check: need n_reps >= 2");
  std::vector<PartialMaximaRow> out;
  for (long n : n_list) {
    PartialMaximaRow row;
    row.n = n;
    row.a_n = normalizer_a_n(C, alpha, static_cast<double>(n) * opt.h);
    auto maxima = parallel_map(static_cast<std::size_t>(n_reps), opt.workers, [&](std::size_t r) {
      RandomStream rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(n), r}));
      SkeletonSeries s = simulate_skeleton(model, opt.h, n, opt.subgrid, rng);
      return std::max(s.V[0], s.H.maxCoeff());
    });
    row.normalized = Eigen::Map<Eigen::ArrayXd>(maxima.data(), n_reps) / row.a_n;
    row.ks = ks_distance(row.normalized, [&](double x) { return frechet_cdf(x, kappa, alpha); });
    out.push_back(std::move(row));
  }
  return out;
}

IntegratedLimitReport integrated_limit_check(const LevyModel& model, double alpha, const std::vector<double>& t_list,
                                             long n_reps, const ReplicationOptions& opt,
                                             const IntegratedLimitTolerances& tol) {
  if (!(alpha > 0.0)) throw InvalidConfig("integrated_limit_check: alpha must be > 0");
  if (std::abs(alpha - 0.5) <= 0.05 || std::abs(alpha - 1.0) <= 0.05)
    throw BoundaryAlpha("integrated_limit_check: alpha within 0.05 of a boundary case (1/2 or 1)");
  if (alpha > 0.5 && alpha < 1.0)
    throw InvalidConfig("integrated_limit_check: alpha in (1/2, 1) is not covered");
  if (t_list.empty()) throw InvalidConfig("integrated_limit_check: empty t_list");
  if (n_reps < 20) throw InvalidConfig("integrated_limit_check: need n_reps >= 20");

  IntegratedLimitReport rep;
  rep.alpha = alpha;
  rep.regime = alpha > 1.0 ? "normal" : "stable";
  if (const auto* m = std::get_if<CogarchCPP>(&model))
    rep.symmetric_driver = jump_law_symmetric(m->jump_law);
  else
    rep.symmetric_driver = true;

  Eigen::ArrayXd tg = Eigen::Map<const Eigen::ArrayXd>(t_list.data(), static_cast<Eigen::Index>(t_list.size()));
  auto paths = parallel_map(static_cast<std::size_t>(n_reps), opt.workers, [&](std::size_t r) {
    RandomStream rng(derive_seed(opt.seed, {r}));
    return simulate_integrated(model, tg, opt.subgrid, rng);
  });

  Eigen::ArrayXd logt(tg.size()), logiqr(tg.size());
  for (Eigen::Index j = 0; j < tg.size(); ++j) {
    Eigen::ArrayXd y(n_reps);
    for (long r = 0; r < n_reps; ++r) y[r] = paths[r][j];
    IntegratedLimitRow row;
    row.t = tg[j];
    row.iqr = iqr(y);
    if (rep.regime == "normal") {
      Eigen::ArrayXd z = (y - y.mean()) / std::sqrt(row.t);
      double sd = std::sqrt(z.square().sum() / (n_reps - 1.0));
      row.skewness = sample_skewness(z);
      row.excess_kurtosis = excess_kurtosis(z);
      row.ks_normal = ks_distance(z, [sd](double x) { return normal_cdf(x / sd); });
    } else {
      Eigen::ArrayXd a = y.abs() / std::pow(row.t, 1.0 / (2.0 * alpha));
      row.hill = hill_estimator(a, default_hill_k(n_reps)).alpha_hat;
    }
    logt[j] = std::log(row.t);
    logiqr[j] = std::log(row.iqr);
    rep.rows.push_back(row);
  }
  rep.expected_slope = rep.regime == "normal" ? 0.5 : 1.0 / (2.0 * alpha);
  if (tg.size() >= 3) {
    rep.slope = ols_fit(logt, logiqr).slope;
  } else if (tg.size() == 2) {
    rep.slope = (logiqr[1] - logiqr[0]) / (logt[1] - logt[0]);
  }
  rep.gate_slope = tg.size() >= 2 && std::abs(rep.slope - rep.expected_slope) <= tol.slope;

  const auto& last = rep.rows.back();
  if (rep.regime == "normal") {
    rep.gate_skew = std::abs(last.skewness) <= tol.skew;
    rep.gate_kurtosis = std::abs(last.excess_kurtosis) <= tol.kurtosis;
    rep.gate_ks = last.ks_normal <= tol.ks;
    rep.pass = rep.gate_skew && rep.gate_kurtosis && rep.gate_ks;
  } else {
    rep.gate_hill = std::abs(last.hill - 2.0 * alpha) <= tol.hill_rel * 2.0 * alpha;
    rep.pass = rep.gate_hill && rep.gate_slope;
  }
  return rep;
}

}  // namespace genou
