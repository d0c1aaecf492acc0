#include <doctest.h>

#include <cmath>

#include "genou/genou_sim.hpp"
#include "genou/theory_constants.hpp"
#include "support.hpp"

using namespace genou;

namespace {

CogarchCPP doubling(double mu = 1.0, double c = 1.0) {
  CogarchCPP m;
  m.beta = 1.0;
  m.c = c;
  m.mu = mu;
  m.lambda_g = std::exp(-c);
  m.jump_law = DeterministicAbs{1.0};
  return m;
}

const Nelson kNelson{1.0, 1.0, std::sqrt(2.0)};

MonteCarloOptions small(long n = 20000, std::uint64_t seed = 3) {
  MonteCarloOptions o;
  o.n_paths = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("deterministic exponent gives closed-form functionals") {
  CogarchCPP m = doubling();
  m.mu = 0.0;  // xi_t = t
  MonteCarloOptions o = small(100);
  o.horizon = 20.0;
  TheoryConstant s = mc_sup_exponent(m, 1.0, 2.0, o);
  CHECK(s.value == 1.0);
  CHECK(s.std_error == 0.0);
  CHECK(s.dt == 0.0);
  TheoryConstant f = frechet_constant(m, 1.0, o);
  CHECK(f.value == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  TheoryConstant th = extremal_index_V(m, 1.0, 0.5, o);
  CHECK(th.value == doctest::Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(tail_constant_I(m, 1.0, 1.0, o).value == 0.0);
}

TEST_CASE("sup functionals share one path family") {
  MonteCarloOptions o = small();
  double alpha = 2.0;
  TheoryConstant s05 = mc_sup_exponent(kNelson, alpha, 0.5, o);
  TheoryConstant s1 = mc_sup_exponent(kNelson, alpha, 1.0, o);
  TheoryConstant s2 = mc_sup_exponent(kNelson, alpha, 2.0, o);
  CHECK(s05.value <= s1.value);
  CHECK(s1.value <= s2.value);
  CHECK(s1.value > 1.0);
  for (const auto& s : {s05, s1, s2}) {
    CHECK(s.coarse_value <= s.value);
    CHECK(s.extrapolated >= s.value);
    CHECK(s.dt == o.dt);
    CHECK(s.n_paths == o.n_paths);
  }

  TheoryConstant f = frechet_constant(kNelson, alpha, o);
  CHECK(f.value > 0.0);
  CHECK(f.value <= s1.value);

  TheoryConstant th = extremal_index_V(kNelson, alpha, 1.0, o);
  CHECK(th.value > 0.0);
  CHECK(th.value <= 1.0);
  // theta(1) * E sup_[0,1] is the Frechet numerator on identical paths.
  CHECK(th.value * s1.value == doctest::Approx(f.value).epsilon(1e-12));

  // Worker count does not change the result.
  MonteCarloOptions w = o;
  w.workers = 3;
  CHECK(frechet_constant(kNelson, alpha, w).value == f.value);
}

TEST_CASE("h-scaling identity") {
  SUBCASE("h = 1 compares a quantity with itself") {
    IdentityCheck c = verify_h_scaling_identity(kNelson, 2.0, 1.0, small(2000));
    CHECK(c.z_score == 0.0);
    CHECK(c.pass);
  }
  SUBCASE("holds at other h") {
    for (double h : {0.5, 2.0}) {
      IdentityCheck c = verify_h_scaling_identity(doubling(), 1.0, h, small(20000));
      CHECK(c.pass);
      CHECK(std::abs(c.z_score) < 3.0);
    }
  }
  SUBCASE("negative control: Psi(alpha) != 0") {
    CogarchCPP m = doubling();
    m.mu = 0.0;
    MonteCarloOptions o = small(100);
    CHECK_THROWS_AS(verify_h_scaling_identity(m, 1.0, 2.0, o), PreconditionViolated);
    for (double h : {0.5, 2.0, 4.0}) {
      IdentityCheck c = h_scaling_identity_sides(m, 1.0, h, o);
      CHECK(c.lhs.value == doctest::Approx(1.0 - std::exp(-h)).epsilon(1e-13));
      CHECK(c.rhs.value == doctest::Approx(h * (1.0 - std::exp(-1.0))).epsilon(1e-13));
      CHECK_FALSE(c.pass);
    }
  }
  SUBCASE("right side is linear in h") {
    MonteCarloOptions o = small(2000);
    IdentityCheck a = h_scaling_identity_sides(kNelson, 2.0, 2.0, o), b = h_scaling_identity_sides(kNelson, 2.0, 4.0, o);
    CHECK(b.rhs.value == doctest::Approx(2.0 * a.rhs.value).epsilon(1e-14));
  }
}

TEST_CASE("first-arrival identity for the COGARCH driver") {
  CHECK(first_arrival_transform(doubling(), 1.0) == 0.5);
  IdentityCheck c = verify_first_arrival_identity(doubling(), 1.0, small(20000));
  CHECK(c.pass);
  CHECK(c.lhs.value == doctest::Approx(c.rhs.value).epsilon(0.1));
  // Time change: doubling mu and c leaves alpha at 1.
  CogarchCPP fast = doubling(2.0, 2.0);
  REQUIRE(std::abs(laplace_exponent(fast, 1.0)) < 1e-14);
  CHECK(verify_first_arrival_identity(fast, 1.0, small(20000)).pass);

  CogarchCPP off = doubling();
  off.c = 1.2;
  CHECK_THROWS_AS(verify_first_arrival_identity(off, 1.0, small(100)), PreconditionViolated);
}

TEST_CASE("tail scale of the stationary law") {
  CHECK(tail_scale_C(kNelson, 2.0).value == doctest::Approx(0.5));
  // V scales with a, so C scales with a^alpha.
  CHECK(tail_scale_C(Nelson{1.0, 2.0, std::sqrt(2.0)}, 2.0).value == doctest::Approx(2.0));

  // Exact Pareto with P(X > x) = 3 x^{-1.5}.
  Eigen::ArrayXd grid(1000000);
  for (Eigen::Index i = 0; i < grid.size(); ++i) grid[i] = std::pow(3.0 / ((i + 1.0) / (grid.size() + 1.0)), 1.0 / 1.5);
  CHECK(empirical_tail_scale(grid, 1.5, 0.995).value == doctest::Approx(3.0).epsilon(0.01));

  RandomStream r(4);
  Eigen::ArrayXd v(1000000);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = stationary_init(kNelson, r);
  TheoryConstant e = empirical_tail_scale(v, 2.0, 0.995);
  CHECK(e.value == doctest::Approx(0.5).epsilon(0.2));
  CHECK(e.std_error > 0.0);

  TailScaleOptions opt;
  opt.n = 200000;
  opt.q = 0.99;
  TheoryConstant cg = tail_scale_C(doubling(), 1.0, opt);
  CHECK(cg.value > 0.0);
  CHECK(cg.warnings.size() == 1);
  opt.plateau_tol = 1e-6;
  CHECK_THROWS_AS(tail_scale_C(doubling(), 1.0, opt), EstimationUnstable);
}

TEST_CASE("normalizer") {
  CHECK(normalizer_a_n(1.0, 2.0, 5000.0) == doctest::Approx(std::sqrt(5000.0)));
  CHECK(normalizer_a_n(0.5, 2.0, 2.0) == doctest::Approx(1.0));
  CHECK(normalizer_a_n(0.5, 2.0, 200.0) < normalizer_a_n(0.5, 2.0, 800.0));
  CHECK_THROWS_AS(normalizer_a_n(0.0, 2.0, 10.0), DomainError);
  CHECK_THROWS_AS(normalizer_a_n(1.0, -1.0, 10.0), DomainError);
}

TEST_CASE("truncation horizon") {
  // Psi(1) = -1 for the reference Nelson model.
  CHECK(default_truncation_horizon(kNelson, 2.0) == doctest::Approx(std::log(1e4)));
  MonteCarloOptions o = small(20000);
  HorizonAudit a = horizon_audit([](const MonteCarloOptions& opt) { return frechet_constant(kNelson, 2.0, opt); },
                                 kNelson, 2.0, o);
  CHECK(a.stable);
  CHECK(a.doubled.horizon == doctest::Approx(2.0 * a.base.horizon));

  o.horizon = 1.0;
  TheoryConstant shortT = frechet_constant(kNelson, 2.0, o);
  REQUIRE(shortT.warnings.size() == 1);
  CHECK(shortT.warnings[0].find("horizon") != std::string::npos);
}

TEST_CASE("increment constants") {
  MonteCarloOptions o = small(20000);
  TheoryConstant t = tail_constant_I(doubling(), 1.0, 1.0, o);
  CHECK(t.value > 0.0);
  TheoryConstant th = extremal_index_I(doubling(), 1.0, 1.0, 4, o);
  CHECK(th.value > 0.0);
  CHECK(th.value <= 1.0);
  CHECK_THROWS_AS(extremal_index_I(doubling(), 1.0, 1.0, 1, o), InvalidConfig);
  CHECK_THROWS_AS(mc_sup_exponent(kNelson, 2.0, 1.0, small(1)), InvalidConfig);
}

TEST_CASE("identity check z-score") {
  TheoryConstant a, b;
  a.value = 1.0;
  a.std_error = 0.3;
  b.value = 2.0;
  b.std_error = 0.4;
  IdentityCheck c = make_identity_check(a, b);
  CHECK(c.z_score == doctest::Approx(-2.0));
  CHECK(c.pass);
  CHECK_FALSE(make_identity_check(a, b, 1.5).pass);
}
