#include <doctest.h>

#include <cmath>

#include "genou/extreme_stats.hpp"
#include "genou/genou_sim.hpp"
#include "support.hpp"

using namespace genou;

namespace {

CogarchCPP doubling_model(double beta = 1.0) {
  CogarchCPP m;
  m.beta = beta;
  m.c = 1.0;
  m.mu = 1.0;
  m.lambda_g = std::exp(-1.0);
  m.jump_law = DeterministicAbs{1.0};
  return m;
}

const Nelson kNelson{1.0, 1.0, std::sqrt(2.0)};

std::uint64_t tag(long i) { return static_cast<std::uint64_t>(i); }

}  // namespace

TEST_CASE("recurrence coefficients: closed forms and limits") {
  CogarchCPP m = doubling_model(0.7);
  m.mu = 0.0;
  RandomStream r(1);
  RecurrenceCoeffs c = sample_recurrence_coeffs(m, 2.0, r);
  CHECK(c.A == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(c.B == doctest::Approx(0.7 * (1.0 - std::exp(-2.0))).epsilon(1e-14));

  for (const LevyModel& model : {LevyModel{kNelson}, LevyModel{doubling_model()}}) {
    RecurrenceCoeffs z = sample_recurrence_coeffs(model, 1e-9, r);
    CHECK(std::abs(z.A - 1.0) < 1e-3);
    CHECK(std::abs(z.B) < 1e-6);
  }
  CHECK_THROWS_AS(sample_recurrence_coeffs(kNelson, 0.0, r), InvalidConfig);
  CHECK_THROWS_AS(sample_recurrence_coeffs(kNelson, 1.0, r, 0), InvalidConfig);
}

TEST_CASE("E A^alpha = 1 over a window") {
  for (const LevyModel& model : {LevyModel{kNelson}, LevyModel{doubling_model()}}) {
    double alpha = find_alpha(model);
    std::vector<double> x, lag;
    RandomStream r(2);
    for (int i = 0; i < 100000; ++i) x.push_back(std::pow(sample_recurrence_coeffs(model, 0.1, r, 4).A, alpha));
    CHECK(within_se(mean_se(x), 1.0));
    // Successive draws are independent.
    for (std::size_t i = 1; i < x.size(); ++i) lag.push_back((x[i] - 1.0) * (x[i - 1] - 1.0));
    CHECK(within_se(mean_se(lag), 0.0, 4.0));
  }
}

TEST_CASE("Nelson stationary law") {
  InverseGamma law = nelson_stationary_law(kNelson);
  CHECK(law.shape == doctest::Approx(2.0));
  CHECK(law.scale == doctest::Approx(1.0));
  CHECK(law.shape == doctest::Approx(find_alpha(kNelson)));

  // Finite variance needs shape > 2; use sigma^2 = 0.4 (shape 6, scale 5, mean 1).
  Nelson light{1.0, 1.0, std::sqrt(0.4)};
  std::vector<double> v;
  RandomStream r(3);
  for (int i = 0; i < 200000; ++i) v.push_back(stationary_init(light, r));
  CHECK(within_se(mean_se(v), 1.0));

  SUBCASE("agrees with an Euler scheme for the SDE") {
    // dV = lambda (a - V) dt + sigma V dW, one long path thinned to near-independence.
    const double dt = 0.002, s2 = 2.0;
    const long thin = 2500, keep = 4000;
    RandomStream e(4);
    double V = 1.0, sq = std::sqrt(dt * s2);
    std::vector<double> euler;
    for (long k = 0; k < thin * (keep + 10); ++k) {
      V += (1.0 - V) * dt + sq * V * e.normal();
      if (k >= 10 * thin && k % thin == 0) euler.push_back(V);
    }
    std::vector<double> exact;
    for (int i = 0; i < 20000; ++i) exact.push_back(stationary_init(kNelson, e));
    double d = ks_two_sample(to_array(euler), to_array(exact));
    double p = ks_two_sample_pvalue(d, static_cast<double>(euler.size()), static_cast<double>(exact.size()));
    CHECK(p > 0.01);
  }

  SUBCASE("Hill estimate recovers the shape") {
    Eigen::ArrayXd big(1000000);
    for (Eigen::Index i = 0; i < big.size(); ++i) big[i] = stationary_init(kNelson, r);
    CHECK(hill_estimator(big, 1000).alpha_hat == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("skeleton shapes and invariants") {
  for (const LevyModel& model : {LevyModel{kNelson}, LevyModel{doubling_model()}}) {
    RandomStream r(5);
    SkeletonSeries s = simulate_skeleton(model, 0.5, 2000, 8, r);
    REQUIRE(s.V.size() == 2001);
    REQUIRE(s.H.size() == 2000);
    REQUIRE(s.I.size() == 2000);
    CHECK(s.size() == 2000);
    CHECK((s.V > 0.0).all());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      CHECK(s.H[k] >= s.V[k]);
      CHECK(s.H[k] >= s.V[k + 1]);
    }
    CHECK(s.model_id == model_hash(model));
    CHECK(s.seed == 5);
  }
  RandomStream r(6);
  CHECK(simulate_skeleton(doubling_model(), 1.0, 10, 8, r).convention == "left_limit");
  CHECK(simulate_skeleton(kNelson, 1.0, 10, 8, r).convention == "continuous");
  CHECK(simulate_skeleton(kNelson, 1.0, 10, 8, r).burn_in == 0);
  CHECK(simulate_skeleton(doubling_model(), 1.0, 10, 8, r).burn_in == burn_in_steps(doubling_model(), 1.0));
  CHECK_THROWS_AS(simulate_skeleton(kNelson, 1.0, 0, 8, r), InvalidConfig);
  CHECK_THROWS_AS(simulate_skeleton(kNelson, -1.0, 10, 8, r), InvalidConfig);
}

TEST_CASE("COGARCH skeleton is event-exact") {
  SUBCASE("beta = 0 gives V = exp(-xi) on the same random stream") {
    CogarchCPP m = doubling_model(0.0);
    RandomStream a(7), b(7);
    SkeletonSeries s = simulate_skeleton_from(m, 1.0, 0.5, 200, 0, a);
    EventPath p = simulate_xi_events(m, 100.0, b);
    for (long k = 0; k <= 200; ++k) CHECK(s.V[k] == doctest::Approx(std::exp(-p.xi_at(0.5 * k))).epsilon(1e-10));
    // Each block ratio is exp(-c h) times a power of the jump factor 2.
    for (long k = 0; k < 200; ++k) {
      double jumps = std::log2(s.V[k + 1] / s.V[k] * std::exp(0.5));
      CHECK(std::abs(jumps - std::round(jumps)) < 1e-9);
      // With z = 1 the increment vanishes exactly on blocks without jumps.
      CHECK((std::round(jumps) == 0.0) == (s.I[k] == 0.0));
    }
  }
  SUBCASE("blocks without jumps follow the deterministic flow") {
    CogarchCPP m = doubling_model(0.8);
    RandomStream a(8);
    SkeletonSeries s = simulate_skeleton_from(m, 2.0, 0.25, 500, 0, a);
    int quiet = 0;
    for (long k = 0; k < 500; ++k) {
      if (s.I[k] != 0.0) continue;
      ++quiet;
      double e = std::exp(-0.25);
      CHECK(s.V[k + 1] == doctest::Approx(e * s.V[k] + 0.8 * (1.0 - e)).epsilon(1e-12));
      CHECK(s.H[k] == s.V[k]);  // the flow decays towards beta/c < V
    }
    CHECK(quiet > 300);
  }
  SUBCASE("subgrid is ignored") {
    RandomStream a(9), b(9);
    SkeletonSeries x = simulate_skeleton(doubling_model(), 1.0, 100, 1, a);
    SkeletonSeries y = simulate_skeleton(doubling_model(), 1.0, 100, 64, b);
    CHECK((x.V == y.V).all());
    CHECK(x.subgrid == 0);
  }
}

TEST_CASE("Nelson without mean reversion level is a geometric process") {
  Nelson m{1.0, 0.0, std::sqrt(2.0)};
  std::vector<double> d, d2;
  // Fresh blocks from V0 = 1: a long path would underflow.
  for (long k = 0; k < 100000; ++k) {
    RandomStream r(derive_seed(10, {tag(k)}));
    d.push_back(std::log(simulate_skeleton_from(m, 1.0, 0.5, 1, 4, r).V[1]));
  }
  MeanSe ms = mean_se(d);
  CHECK(within_se(ms, -(1.0 + 1.0) * 0.5));
  for (double x : d) d2.push_back((x - ms.mean) * (x - ms.mean));
  CHECK(within_se(mean_se(d2), 2.0 * 0.5));
}

TEST_CASE("discretization error shrinks with the subgrid") {
  auto endpoint = [](int sub, std::uint64_t seed) {
    Eigen::ArrayXd v(100000);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      RandomStream r(derive_seed(seed, {tag(i)}));
      v[i] = simulate_skeleton_from(kNelson, 1.0, 1.0, 1, sub, r).V[1];
    }
    return v;
  };
  Eigen::ArrayXd ref = endpoint(64, 11);
  double k1 = ks_two_sample(endpoint(1, 12), ref);
  double k2 = ks_two_sample(endpoint(2, 13), ref);
  double k4 = ks_two_sample(endpoint(4, 14), ref);
  CHECK(k1 > k2);
  CHECK(k2 > k4);
}

TEST_CASE("increments of the integrated process") {
  SUBCASE("no jumps gives I = 0") {
    CogarchCPP m = doubling_model();
    m.mu = 0.0;
    RandomStream r(15);
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(10, 1.0, 10.0);
    CHECK((simulate_integrated(m, t, 8, r) == 0.0).all());
  }
  SUBCASE("Ito isometry E I_1^2 = E V") {
    Nelson m{1.0, 1.0, std::sqrt(0.4)};
    std::vector<double> sq;
    for (int i = 0; i < 40000; ++i) {
      RandomStream r(derive_seed(16, {tag(i)}));
      double I = simulate_skeleton(m, 1.0, 1, 32, r).I[0];
      sq.push_back(I * I);
    }
    CHECK(within_se(mean_se(sq), 1.0));
  }
  SUBCASE("symmetric driver gives uncorrelated increment signs") {
    RandomStream r(17);
    CogarchCPP sym = doubling_model();
    sym.jump_law = TwoPoint{1.0};
    SkeletonSeries t = simulate_skeleton(sym, 1.0, 100000, 8, r);
    std::vector<double> prod;
    for (Eigen::Index k = 1; k < t.size(); ++k) {
      auto sgn = [](double x) { return static_cast<double>((x > 0) - (x < 0)); };
      prod.push_back(sgn(t.I[k]) * sgn(t.I[k - 1]));
    }
    CHECK(within_se(mean_se(prod), 0.0, 4.0));
  }
  SUBCASE("integrated path equals the cumulative skeleton increments") {
    for (const LevyModel& model : {LevyModel{kNelson}, LevyModel{doubling_model()}}) {
      RandomStream a(18), b(18);
      SkeletonSeries s = simulate_skeleton(model, 1.0, 50, 8, a);
      Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(50, 1.0, 50.0);
      Eigen::ArrayXd I = simulate_integrated(model, t, 8, b);
      double cum = 0.0;
      for (Eigen::Index k = 0; k < 50; ++k) {
        cum += s.I[k];
        CHECK(I[k] == doctest::Approx(cum).epsilon(1e-12).scale(1.0));
      }
    }
  }
  SUBCASE("times off the grid are rejected") {
    RandomStream r(19);
    Eigen::ArrayXd t(1);
    t << 0.3;
    CHECK_THROWS_AS(simulate_integrated(kNelson, t, 8, r), InvalidConfig);
  }
}

TEST_CASE("burn-in length") {
  // -Psi(1) = 1 for the reference Nelson model: 30 steps at h = 1.
  CHECK(burn_in_steps(kNelson, 1.0) == 30);
  CHECK(burn_in_steps(kNelson, 0.5) == 60);
  CHECK(burn_in_steps(BrownianExponent{1e-3, 1.0, 1.0}, 1.0) == 100000);
}
