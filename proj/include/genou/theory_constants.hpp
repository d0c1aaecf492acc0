#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "genou/levy_models.hpp"

namespace genou {

struct TheoryConstant {
  std::string label;
  double value = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  double horizon = 0.0;
  double dt = 0.0;  // 0 when the path functional is event-exact
  // Grid functionals only: estimate on the 2*dt sub-grid of the same paths and
  // the sqrt(dt)-Richardson extrapolation of the two.
  double coarse_value = std::numeric_limits<double>::quiet_NaN();
  double extrapolated = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

struct IdentityCheck {
  TheoryConstant lhs;
  TheoryConstant rhs;
  double z_score = 0.0;
  bool pass = false;
};

IdentityCheck make_identity_check(TheoryConstant lhs, TheoryConstant rhs, double z_limit = 3.0);

struct MonteCarloOptions {
  long n_paths = 100000;
  double horizon = 0.0;  // length of the sup_{s >= t0} window; 0 selects the default
  double dt = 1.0 / 32;  // ignored for the event-driven driver
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// T with exp(T Psi(alpha/2)) = 1e-4.
double default_truncation_horizon(const LevyModel& model, double alpha);

/// E sup_{0<=s<=h} exp(-alpha xi_s).
TheoryConstant mc_sup_exponent(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt);

/// E (sup_{0<=s<=1} exp(-alpha xi_s) - sup_{s>=1} exp(-alpha xi_s))^+.
TheoryConstant frechet_constant(const LevyModel& model, double alpha, const MonteCarloOptions& opt);

/// theta(h) = h * frechet numerator / E sup_{0<=s<=h} exp(-alpha xi_s), both on common paths.
TheoryConstant extremal_index_V(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt);

/// Extremal index of the increments I_k with the competing maximum over
/// blocks 2..K. The same paths also evaluate 2..2K; a difference above one
/// standard error is recorded as a warning.
TheoryConstant extremal_index_I(const LevyModel& model, double alpha, double h, int K,
                                const MonteCarloOptions& opt);

/// E [(int_0^h exp(-xi_{t-}/2) dL_t)^+]^{2 alpha}.
TheoryConstant tail_constant_I(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt);

/// Options for the empirical tail scale of models without a closed-form law.
struct TailScaleOptions {
  long n = 1000000;   // series length
  double q = 0.995;   // quantile used for the estimate
  double h = 1.0;
  std::uint64_t seed = 1;
  double plateau_tol = 0.3;  // max relative spread of Hill estimates over the plateau window
};

/// C in P(V_0 > x) ~ C x^{-alpha}. Analytic for Nelson; otherwise
/// x_q^alpha (1 - q) from a long simulated series, with a Hill plateau check.
TheoryConstant tail_scale_C(const LevyModel& model, double alpha, const TailScaleOptions& opt = {});

/// x_q^alpha (1 - q) on a given sample with batch-means standard error.
TheoryConstant empirical_tail_scale(const Eigen::Ref<const Eigen::ArrayXd>& data, double alpha, double q,
                                    int batches = 20);

/// (C n)^{1/alpha}.
double normalizer_a_n(double C, double alpha, double n);

/// Both sides of the h-scaling identity without checking Psi(alpha) = 0.
IdentityCheck h_scaling_identity_sides(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt);

/// E(sup_{[0,h]} - sup_{[h,inf)})^+ against h E(sup_{[0,1]} - sup_{[1,inf)})^+ on
/// independent paths (shared paths when h = 1).
IdentityCheck verify_h_scaling_identity(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt);

/// E exp(-alpha c Gamma_1) = mu / (mu + alpha c) for the first arrival Gamma_1.
double first_arrival_transform(const CogarchCPP& model, double alpha);

/// Frechet numerator against mu / E exp(-alpha c Gamma_1) * E(1 - sup_{s>=Gamma_1} exp(-alpha xi_s))^+.
IdentityCheck verify_first_arrival_identity(const CogarchCPP& model, double alpha, const MonteCarloOptions& opt);

/// Re-evaluates `fn` with the horizon doubled on the same seed; the prefix of
/// every path is shared, so the difference isolates the truncation.
struct HorizonAudit {
  TheoryConstant base;
  TheoryConstant doubled;
  double change_in_se = 0.0;
  bool stable = false;  // change below one standard error
};

template <class Fn>
HorizonAudit horizon_audit(Fn&& fn, const LevyModel& model, double alpha, MonteCarloOptions opt) {
  HorizonAudit a;
  if (opt.horizon <= 0.0) opt.horizon = default_truncation_horizon(model, alpha);
  a.base = fn(opt);
  opt.horizon *= 2.0;
  a.doubled = fn(opt);
  double se = std::max(a.base.std_error, 1e-300);
  a.change_in_se = std::abs(a.doubled.value - a.base.value) / se;
  a.stable = a.change_in_se < 1.0;
  return a;
}

}  // namespace genou
