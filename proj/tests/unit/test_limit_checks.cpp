#include <doctest.h>

#include <cmath>

#include "genou/limit_checks.hpp"
#include "genou/random.hpp"

using namespace genou;

namespace {

CogarchCPP stable_model(JumpLaw law) {
  // jump factor e^5 and Psi(0.4) = 0.
  CogarchCPP m;
  m.beta = 1.0;
  m.mu = 1.0;
  m.c = (std::exp(2.0) - 1.0) / 0.4;
  m.lambda_g = (std::exp(5.0) - 1.0) / std::exp(m.c);
  m.jump_law = law;
  return m;
}

}  // namespace

TEST_CASE("expected rate slopes") {
  CHECK(expected_rate_slope(RateStatistic::acv_V, 3.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(expected_rate_slope(RateStatistic::acv_V, 5.0) == -0.5);
  CHECK(expected_rate_slope(RateStatistic::acv_I, 1.0) == doctest::Approx(0.0));
  CHECK(expected_rate_slope(RateStatistic::acv_I, 2.5) == -0.5);
  CHECK(expected_rate_slope(RateStatistic::acf_V, 1.5) == 0.0);
  CHECK(expected_rate_slope(RateStatistic::acf_V, 3.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(expected_rate_slope(RateStatistic::acf_I, 0.8) == 0.0);
  for (auto s : {RateStatistic::acv_V, RateStatistic::acv_I, RateStatistic::acf_V, RateStatistic::acf_I})
    CHECK(rate_statistic_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(rate_statistic_from_string("pacf"), InvalidConfig);
}

TEST_CASE("Frechet limit cdf") {
  CHECK(frechet_cdf(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(frechet_cdf(2.0, 0.5, 2.0) == doctest::Approx(std::exp(-0.125)));
  CHECK(frechet_cdf(0.0, 1.0, 1.0) == 0.0);
  CHECK(frechet_cdf(-3.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("rate diagnostic on i.i.d. Gaussian data") {
  SeriesGenerator gauss = [](long n, RandomStream& r) {
    Eigen::ArrayXd x(n);
    for (long i = 0; i < n; ++i) x[i] = r.normal();
    return x;
  };
  std::vector<long> ns = {1000, 4642, 21544, 100000};
  ReplicationOptions opt;
  opt.seed = 5;
  RateResult r = rate_diagnostic_series(gauss, RateStatistic::acv_V, 1, ns, 200, opt);
  CHECK(r.fit.slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(r.iqr.size() == 4);
  CHECK(std::abs(r.gamma_ref) < 0.01);

  opt.workers = 3;
  CHECK(rate_diagnostic_series(gauss, RateStatistic::acv_V, 1, ns, 200, opt).iqr == r.iqr);

  CHECK_THROWS_AS(rate_diagnostic_series(gauss, RateStatistic::acv_V, 1, {1000, 2000, 4000}, 200, opt),
                  InvalidConfig);
  CHECK_THROWS_AS(rate_diagnostic_series(gauss, RateStatistic::acv_V, 1, {100, 200, 400, 800}, 200, opt),
                  InvalidConfig);
  CHECK_THROWS_AS(rate_diagnostic_series(gauss, RateStatistic::acv_V, 1, ns, 199, opt), InvalidConfig);
  CHECK_THROWS_AS(rate_diagnostic_series(gauss, RateStatistic::acv_V, 600, ns, 200, opt), InvalidConfig);
}

TEST_CASE("partial maxima") {
  Nelson m{1.0, 1.0, std::sqrt(2.0)};
  ReplicationOptions opt;
  opt.subgrid = 8;
  auto rows = partial_maxima_check(m, 2.0, 0.5, 1.0, {10, 40}, 50, opt);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].a_n == doctest::Approx(std::sqrt(5.0)));
  CHECK(rows[1].normalized.size() == 50);
  CHECK((rows[1].normalized > 0.0).all());
  CHECK(rows[1].ks >= 0.0);
  CHECK(rows[1].ks <= 1.0);
  CHECK_THROWS_AS(partial_maxima_check(m, 2.0, 0.5, 1.0, {10}, 1, opt), InvalidConfig);
}

TEST_CASE("integrated limit check regimes") {
  ReplicationOptions opt;
  opt.subgrid = 4;
  Nelson m{1.0, 1.0, std::sqrt(2.0)};
  IntegratedLimitReport r = integrated_limit_check(m, 2.0, {4.0, 16.0}, 40, opt);
  CHECK(r.regime == "normal");
  CHECK(r.expected_slope == 0.5);
  CHECK(r.symmetric_driver);
  CHECK(r.rows.size() == 2);

  CogarchCPP one_sided = stable_model(DeterministicAbs{1.0});
  REQUIRE(std::abs(laplace_exponent(one_sided, 0.4)) < 1e-9);
  IntegratedLimitReport s = integrated_limit_check(one_sided, 0.4, {4.0, 16.0}, 40, opt);
  CHECK(s.regime == "stable");
  CHECK(s.expected_slope == doctest::Approx(1.25));
  CHECK_FALSE(s.symmetric_driver);
  CHECK(integrated_limit_check(stable_model(TwoPoint{1.0}), 0.4, {4.0}, 40, opt).symmetric_driver);

  CHECK_THROWS_AS(integrated_limit_check(m, 1.02, {4.0}, 40, opt), BoundaryAlpha);
  CHECK_THROWS_AS(integrated_limit_check(m, 0.47, {4.0}, 40, opt), BoundaryAlpha);
  CHECK_THROWS_AS(integrated_limit_check(m, 0.75, {4.0}, 40, opt), InvalidConfig);
  CHECK_THROWS_AS(integrated_limit_check(m, 2.0, {}, 40, opt), InvalidConfig);
}
