#include "genou/levy_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

namespace genou {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct HermiteRule {
  Eigen::ArrayXd nodes;    // for a standard normal variable
  Eigen::ArrayXd log_w;    // log of probability weights
};

// Golub-Welsch for the probabilists' weight exp(-x^2/2): the Jacobi matrix
// has zero diagonal and off-diagonal sqrt(k).
const HermiteRule& hermite_rule() {
  static const HermiteRule rule = [] {
    constexpr int n = 64;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    HermiteRule r;
    r.nodes = es.eigenvalues().array();
    r.log_w = 2.0 * es.eigenvectors().row(0).transpose().array().abs().log();
    return r;
  }();
  return rule;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string law_string(const JumpLaw& law) {
  return std::visit(overloaded{
                        [](const TwoPoint& j) { return "two_point(" + fmt(j.z) + ")"; },
                        [](const GaussianJump& j) { return "gaussian(" + fmt(j.sd) + ")"; },
                        [](const DeterministicAbs& j) { return "deterministic_abs(" + fmt(j.z) + ")"; },
                    },
                    law);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
bool nonneg_finite(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

double jump_abs_moment(const JumpLaw& law, double p) {
  return std::visit(overloaded{
                        [p](const TwoPoint& j) { return std::pow(j.z, p); },
                        [p](const DeterministicAbs& j) { return std::pow(j.z, p); },
                        [p](const GaussianJump& j) {
                          return std::pow(j.sd, p) * std::pow(2.0, p / 2) *
                                 std::exp(std::lgamma((p + 1) / 2) - 0.5 * std::log(M_PI));
                        },
                    },
                    law);
}

double mean_power_one_plus(const JumpLaw& law, double s, double v) {
  return std::visit(overloaded{
                        [&](const TwoPoint& j) { return std::pow(1.0 + s * j.z * j.z, v); },
                        [&](const DeterministicAbs& j) { return std::pow(1.0 + s * j.z * j.z, v); },
                        [&](const GaussianJump& j) {
                          const auto& r = hermite_rule();
                          Eigen::ArrayXd x = r.nodes * j.sd;
                          Eigen::ArrayXd terms = r.log_w + v * (1.0 + s * x.square()).log();
                          double mx = terms.maxCoeff();
                          if (!std::isfinite(mx)) return std::exp(mx);
                          return std::exp(mx + std::log((terms - mx).exp().sum()));
                        },
                    },
                    law);
}

bool jump_law_symmetric(const JumpLaw& law) {
  return !std::holds_alternative<DeterministicAbs>(law);
}

double sample_jump(const JumpLaw& law, RandomStream& rng) {
  return std::visit(overloaded{
                        [&](const TwoPoint& j) { return rng.coin() ? j.z : -j.z; },
                        [&](const GaussianJump& j) { return j.sd * rng.normal(); },
                        [&](const DeterministicAbs& j) { return j.z; },
                    },
                    law);
}

double CogarchCPP::jump_factor(double z) const { return 1.0 + lambda_g * std::exp(c) * z * z; }

void validate(const LevyModel& model) {
  std::visit(overloaded{
                 [](const Nelson& m) {
                   if (!positive_finite(m.lambda)) throw InvalidConfig("nelson.lambda must be > 0");
                   if (!nonneg_finite(m.a)) throw InvalidConfig("nelson.a must be >= 0");
                   if (!positive_finite(m.sigma)) throw InvalidConfig("nelson.sigma must be > 0");
                 },
                 [](const CogarchCPP& m) {
                   if (!nonneg_finite(m.beta)) throw InvalidConfig("cogarch.beta must be >= 0");
                   if (!positive_finite(m.c)) throw InvalidConfig("cogarch.c must be > 0");
                   if (!nonneg_finite(m.lambda_g)) throw InvalidConfig("cogarch.lambda_g must be >= 0");
                   if (!nonneg_finite(m.mu)) throw InvalidConfig("cogarch.mu must be >= 0");
                   std::visit(overloaded{
                                  [](const TwoPoint& j) {
                                    if (!positive_finite(j.z)) throw InvalidConfig("jump_law.z must be > 0");
                                  },
                                  [](const GaussianJump& j) {
                                    if (!positive_finite(j.sd)) throw InvalidConfig("jump_law.sd must be > 0");
                                  },
                                  [](const DeterministicAbs& j) {
                                    if (!positive_finite(j.z)) throw InvalidConfig("jump_law.z must be > 0");
                                  },
                              },
                              m.jump_law);
                 },
                 [](const BrownianExponent& m) {
                   if (!std::isfinite(m.m)) throw InvalidConfig("brownian_exponent.m must be finite");
                   if (!positive_finite(m.sigma)) throw InvalidConfig("brownian_exponent.sigma must be > 0");
                   if (!nonneg_finite(m.eta_rate)) throw InvalidConfig("brownian_exponent.eta_rate must be >= 0");
                 },
             },
             model);
}

std::string model_name(const LevyModel& model) {
  return std::visit(overloaded{
                        [](const Nelson& m) {
                          return "nelson(lambda=" + fmt(m.lambda) + ",a=" + fmt(m.a) + ",sigma=" + fmt(m.sigma) + ")";
                        },
                        [](const CogarchCPP& m) {
                          return "cogarch_cpp(beta=" + fmt(m.beta) + ",c=" + fmt(m.c) + ",lambda_g=" + fmt(m.lambda_g) +
                                 ",mu=" + fmt(m.mu) + ",jump_law=" + law_string(m.jump_law) + ")";
                        },
                        [](const BrownianExponent& m) {
                          return "brownian_exponent(m=" + fmt(m.m) + ",sigma=" + fmt(m.sigma) +
                                 ",eta_rate=" + fmt(m.eta_rate) + ")";
                        },
                    },
                    model);
}

std::string model_hash(const LevyModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : model_name(model)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_event_driven(const LevyModel& model) { return std::holds_alternative<CogarchCPP>(model); }

double laplace_exponent(const LevyModel& model, double v) {
  if (!std::isfinite(v)) throw DomainError("laplace_exponent: v must be finite");
  if (v == 0.0) return 0.0;
  return std::visit(overloaded{
                        [v](const Nelson& m) {
                          double s2 = m.sigma * m.sigma;
                          return -(0.5 * s2 + m.lambda) * v + 0.5 * s2 * v * v;
                        },
                        [v](const BrownianExponent& m) { return -m.m * v + 0.5 * m.sigma * m.sigma * v * v; },
                        [v](const CogarchCPP& m) {
                          if (m.mu == 0.0) return -v * m.c;  // avoids 0 * inf when E(1 + sZ^2)^v overflows
                          double s = m.lambda_g * std::exp(m.c);
                          double e = mean_power_one_plus(m.jump_law, s, v);
                          if (std::isnan(e)) throw DomainError("laplace_exponent: jump moment undefined");
                          return -v * m.c + m.mu * (e - 1.0);
                        },
                    },
                    model);
}

double find_alpha(const LevyModel& model, std::optional<double> bracket_hint) {
  constexpr double eps = 1e-7;
  if (laplace_exponent(model, eps) / eps >= 0.0)
    throw NotStationaryHeavyTail("find_alpha: Psi'(0+) >= 0, no stationary heavy-tailed solution");

  constexpr double v_max = 1e6;
  double hi = bracket_hint.value_or(1.0);
  if (!(hi > 0.0) || !std::isfinite(hi)) hi = 1.0;
  while (laplace_exponent(model, hi) < 0.0) {
    hi *= 2.0;
    if (hi > v_max) throw NoPositiveRoot("find_alpha: Psi < 0 on the whole searchable domain");
  }
  double lo = hi / 2.0;
  while (laplace_exponent(model, lo) >= 0.0) {
    hi = lo;
    lo /= 2.0;
    if (lo < 1e-300) throw NoPositiveRoot("find_alpha: no sign change below the bracket");
  }
  for (int it = 0; it < 2000; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (laplace_exponent(model, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(laplace_exponent(model, lo)) <= std::abs(laplace_exponent(model, hi)) ? lo : hi;
}

ConditionReport check_conditions(const LevyModel& model, double d) {
  ConditionReport r;
  r.d = d;
  r.alpha = std::numeric_limits<double>::quiet_NaN();

  bool root = false;
  std::string root_note;
  try {
    r.alpha = find_alpha(model);
    root = true;
    root_note = "alpha = " + fmt(r.alpha);
  } catch (const Error& e) {
    root_note = e.what();
  }
  r.detail.push_back({"psi_root_exists", root, root_note});

  bool eta_nontrivial = std::visit(overloaded{
                                       [](const Nelson& m) { return m.a > 0.0; },
                                       [](const CogarchCPP& m) { return m.beta > 0.0; },
                                       [](const BrownianExponent& m) { return m.eta_rate > 0.0; },
                                   },
                                   model);
  r.detail.push_back({"eta_nonzero", eta_nontrivial, "eta must move for a positive stationary V"});
  r.holds_A = root && eta_nontrivial;

  // The root is only known to machine precision; d equal to alpha up to
  // rounding does not count as exceeding it.
  bool d_above = root && d > r.alpha * (1.0 + 1e-9);
  r.detail.push_back({"d_exceeds_alpha", d_above, "d = " + fmt(d)});

  bool psi_d_finite = false;
  try {
    psi_d_finite = d > 0.0 && std::isfinite(laplace_exponent(model, d));
  } catch (const DomainError&) {
  }
  r.detail.push_back({"psi_d_finite", psi_d_finite, ""});
  r.holds_B = r.holds_A && d_above && psi_d_finite;

  // Moment requirements on (eta, L). Brownian drivers have all moments; for the
  // compound Poisson driver they reduce to moments of the jump law, which are
  // finite for all three supported laws.
  bool moments = true;
  if (const auto* m = std::get_if<CogarchCPP>(&model)) {
    double p2 = jump_abs_moment(m->jump_law, 2.0 * d);
    double p4 = jump_abs_moment(m->jump_law, std::max(4.0 * d, 1.0));
    bool ok2 = std::isfinite(p2), ok4 = std::isfinite(p4);
    r.detail.push_back({"L_moment_2d", ok2, "E|Z|^{2d} = " + fmt(p2)});
    r.detail.push_back({"L_moment_max_4d_1", ok4, "E|Z|^{max(4d,1)} = " + fmt(p4)});
    moments = ok2 && ok4;
  } else {
    r.detail.push_back({"eta_L_moments", true, "Brownian drivers have finite moments of all orders"});
  }
  r.holds_C = r.holds_B && moments;

  // Sample autocovariance CLT-type limits need d > 4; flagged only.
  r.detail.push_back({"d_above_4", d > 4.0, "informational; not part of A/B/C"});
  return r;
}

double EventPath::xi_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return c * t;
  auto k = static_cast<std::size_t>(it - times.begin()) - 1;
  return xi_post[k] + c * (t - times[k]);
}

double EventPath::sup_exp(double alpha, double a, double b) const {
  double best = std::exp(-alpha * xi_at(a));
  auto it = std::upper_bound(times.begin(), times.end(), a);
  for (; it != times.end() && *it <= b; ++it) {
    auto k = static_cast<std::size_t>(it - times.begin());
    best = std::max(best, std::exp(-alpha * xi_post[k]));
  }
  return best;
}

EventPath simulate_xi_events(const CogarchCPP& model, double horizon, RandomStream& rng) {
  EventPath p;
  p.horizon = horizon;
  p.c = model.c;
  if (!(horizon > 0.0) || model.mu <= 0.0) return p;
  double t = 0.0, xi = 0.0;
  for (;;) {
    double w = rng.exponential(model.mu);
    if (t + w > horizon) break;
    t += w;
    double z = sample_jump(model.jump_law, rng);
    double g = std::log(model.jump_factor(z));
    xi += model.c * w - g;
    p.times.push_back(t);
    p.jumps.push_back(z);
    p.log_jumps.push_back(g);
    p.xi_post.push_back(xi);
  }
  return p;
}

GaussianStep gaussian_step(const LevyModel& model, double dt) {
  return std::visit(overloaded{
                        [dt](const Nelson& m) {
                          return GaussianStep{(0.5 * m.sigma * m.sigma + m.lambda) * dt, m.sigma * std::sqrt(dt)};
                        },
                        [dt](const BrownianExponent& m) { return GaussianStep{m.m * dt, m.sigma * std::sqrt(dt)}; },
                        [](const CogarchCPP&) -> GaussianStep {
                          throw InvalidConfig("gaussian_step: COGARCH driver is event-driven");
                        },
                    },
                    model);
}

long grid_steps(double t, double dt) {
  double r = t / dt;
  double n = std::round(r);
  if (std::abs(r - n) <= 1e-9 * std::max(1.0, r)) return static_cast<long>(n);
  return static_cast<long>(std::ceil(r));
}

GridPath simulate_xi_grid(const LevyModel& model, double horizon, double dt, RandomStream& rng, bool with_L) {
  if (!(dt > 0.0) || !(dt <= horizon)) throw InvalidConfig("simulate_xi_grid: need 0 < dt <= horizon");
  GaussianStep st = gaussian_step(model, dt);
  long n = grid_steps(horizon, dt);
  GridPath p;
  p.dt = dt;
  p.xi.resize(n + 1);
  p.xi[0] = 0.0;
  if (with_L) p.dL.resize(n);
  double sq = std::sqrt(dt);
  for (long k = 0; k < n; ++k) {
    p.xi[k + 1] = p.xi[k] + st.mean + st.sd * rng.normal();
    if (with_L) p.dL[k] = sq * rng.normal();
  }
  return p;
}

}  // namespace genou
