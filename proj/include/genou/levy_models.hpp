#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "genou/errors.hpp"
#include "genou/random.hpp"

namespace genou {

// Jump laws for the compound Poisson driver L.

struct TwoPoint {
  double z = 1.0;  // +z or -z with probability 1/2
};
struct GaussianJump {
  double sd = 1.0;
};
struct DeterministicAbs {
  double z = 1.0;  // always +z
};
using JumpLaw = std::variant<TwoPoint, GaussianJump, DeterministicAbs>;

/// E|Z|^p, analytic.
double jump_abs_moment(const JumpLaw& law, double p);
/// E (1 + s Z^2)^v, analytic for the point laws and by 64-node Gauss-Hermite
/// quadrature for the Gaussian law.
double mean_power_one_plus(const JumpLaw& law, double s, double v);
bool jump_law_symmetric(const JumpLaw& law);
double sample_jump(const JumpLaw& law, RandomStream& rng);

// Driving triples (xi, eta, L).

/// xi_t = -sigma W1_t + (sigma^2/2 + lambda) t, eta_t = lambda a t, L = W2.
struct Nelson {
  double lambda = 1.0;
  double a = 1.0;
  double sigma = 1.0;
};

/// L compound Poisson(mu, jump_law);
/// xi_t = c t - sum log(1 + lambda_g e^c Z_k^2), eta_t = beta t.
struct CogarchCPP {
  double beta = 1.0;
  double c = 1.0;
  double lambda_g = 0.0;
  double mu = 1.0;
  JumpLaw jump_law = TwoPoint{};

  /// Multiplicative jump factor 1 + lambda_g e^c z^2 applied to V at an L-jump.
  double jump_factor(double z) const;
};

/// xi_t = sigma W_t + m t, eta_t = eta_rate t, L an independent Brownian motion.
struct BrownianExponent {
  double m = 0.0;
  double sigma = 1.0;
  double eta_rate = 0.0;
};

using LevyModel = std::variant<Nelson, CogarchCPP, BrownianExponent>;

/// Throws InvalidConfig when a parameter is out of range.
void validate(const LevyModel& model);
std::string model_name(const LevyModel& model);
/// Stable 16-hex-digit hash of the model parameters.
std::string model_hash(const LevyModel& model);
bool is_event_driven(const LevyModel& model);

/// Psi(v) = log E exp(-v xi_1).
double laplace_exponent(const LevyModel& model, double v);

/// Positive root of Psi. Brackets geometrically from the hint (or 1), then
/// bisects to machine precision.
double find_alpha(const LevyModel& model, std::optional<double> bracket_hint = std::nullopt);

struct ConditionDetail {
  std::string label;
  bool holds = false;
  std::string note;
};

struct ConditionReport {
  double alpha = 0.0;  // NaN when no positive root exists
  double d = 0.0;
  bool holds_A = false;
  bool holds_B = false;
  bool holds_C = false;
  std::vector<ConditionDetail> detail;
};

ConditionReport check_conditions(const LevyModel& model, double d);

/// Exact path of xi for the COGARCH driver on [0, horizon]: linear with slope c
/// between arrivals, downward jump log_jumps[k] at times[k].
struct EventPath {
  double horizon = 0.0;
  double c = 0.0;
  std::vector<double> times;
  std::vector<double> jumps;      // L-jump sizes Z_k
  std::vector<double> log_jumps;  // log(1 + lambda_g e^c Z_k^2)
  std::vector<double> xi_post;    // xi at times[k], after the jump

  /// Right-continuous value xi_t.
  double xi_at(double t) const;
  /// sup over s in [a, b] of exp(-alpha xi_s); attained at a or right after a jump.
  double sup_exp(double alpha, double a, double b) const;
};

EventPath simulate_xi_events(const CogarchCPP& model, double horizon, RandomStream& rng);

/// xi on the uniform grid k*dt, k = 0..n, optionally with the increments of L
/// over each step (dL[k] covers (k dt, (k+1) dt]).
struct GridPath {
  double dt = 0.0;
  Eigen::ArrayXd xi;
  Eigen::ArrayXd dL;
};

/// Mean and standard deviation of a xi-increment over a step dt for the
/// Gaussian families.
struct GaussianStep {
  double mean = 0.0;
  double sd = 0.0;
};
GaussianStep gaussian_step(const LevyModel& model, double dt);

GridPath simulate_xi_grid(const LevyModel& model, double horizon, double dt, RandomStream& rng,
                          bool with_L = false);

/// Number of grid steps of size dt covering length t (exact when dt divides t).
long grid_steps(double t, double dt);

}  // namespace genou
