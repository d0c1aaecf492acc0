#include "genou/genou_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genou {

namespace {

// Euler-exact stepper for the Gaussian families: xi-increments are exact, the
// eta-integral over a sub-step uses the trapezoidal rule.
struct DiffusionStepper {
  GaussianStep xi;
  double eta_rate = 0.0;
  double dt = 0.0;
  double sqdt = 0.0;

  DiffusionStepper(const LevyModel& model, double step) : xi(gaussian_step(model, step)), dt(step) {
    sqdt = std::sqrt(step);
    if (const auto* m = std::get_if<Nelson>(&model))
      eta_rate = m->lambda * m->a;
    else if (const auto* m = std::get_if<BrownianExponent>(&model))
      eta_rate = m->eta_rate;
  }

  // Advances V; returns the increment of L over the step.
  double advance(double& V, RandomStream& rng) const {
    double dL = sqdt * rng.normal();
    double A = std::exp(-(xi.mean + xi.sd * rng.normal()));
    V = A * V + eta_rate * dt * 0.5 * (A + 1.0);
    return dL;
  }

  RecurrenceCoeffs coeffs(double& logA, RandomStream& rng) const {
    double dxi = xi.mean + xi.sd * rng.normal();
    logA -= dxi;
    double A = std::exp(-dxi);
    return {A, eta_rate * dt * 0.5 * (A + 1.0)};
  }
};

// Deterministic COGARCH flow between jumps.
inline double cogarch_decay(const CogarchCPP& m, double V, double w) {
  double e = std::exp(-m.c * w);
  return e * V - m.beta * std::expm1(-m.c * w) / m.c;
}

double first_arrival(const CogarchCPP& m, RandomStream& rng) {
  return m.mu > 0.0 ? rng.exponential(m.mu) : std::numeric_limits<double>::infinity();
}

// Runs the exact COGARCH dynamics from time 0 to `duration` starting at V.
double cogarch_run(const CogarchCPP& m, double V, double duration, RandomStream& rng) {
  double t = 0.0;
  for (double next = first_arrival(m, rng); next <= duration; next += rng.exponential(m.mu)) {
    V = cogarch_decay(m, V, next - t);
    V *= m.jump_factor(sample_jump(m.jump_law, rng));
    t = next;
  }
  return cogarch_decay(m, V, duration - t);
}

int checked_subgrid(int subgrid) {
  if (subgrid < 1) throw InvalidConfig("subgrid must be >= 1");
  return subgrid;
}

}  // namespace

RecurrenceCoeffs sample_recurrence_coeffs(const LevyModel& model, double h, RandomStream& rng, int subgrid) {
  if (!(h > 0.0)) throw InvalidConfig("sample_recurrence_coeffs: h must be > 0");
  if (const auto* m = std::get_if<CogarchCPP>(&model)) {
    double t = 0.0, V = 0.0, log_jumps = 0.0;
    for (double next = first_arrival(*m, rng); next <= h; next += rng.exponential(m->mu)) {
      V = cogarch_decay(*m, V, next - t);
      double f = m->jump_factor(sample_jump(m->jump_law, rng));
      V *= f;
      log_jumps += std::log(f);
      t = next;
    }
    V = cogarch_decay(*m, V, h - t);
    return {std::exp(-(m->c * h - log_jumps)), V};
  }
  int sub = checked_subgrid(subgrid);
  DiffusionStepper st(model, h / sub);
  double logA = 0.0, B = 0.0;
  for (int j = 0; j < sub; ++j) {
    RecurrenceCoeffs c = st.coeffs(logA, rng);
    B = c.A * B + c.B;
  }
  return {std::exp(logA), B};
}

long burn_in_steps(const LevyModel& model, double h) {
  if (!(h > 0.0)) throw InvalidConfig("burn_in_steps: h must be > 0");
  double rate;
  try {
    rate = -laplace_exponent(model, find_alpha(model) / 2.0);
  } catch (const NoPositiveRoot&) {
    rate = -laplace_exponent(model, 1.0);
  }
  if (!(rate > 0.0)) throw NotStationaryHeavyTail("burn_in_steps: no contraction rate");
  // The relative slack keeps exact ratios from rounding up when alpha carries bisection error.
  double steps = std::ceil(30.0 / (rate * h) * (1.0 - 1e-9));
  return static_cast<long>(std::min(steps, 1e5));
}

InverseGamma nelson_stationary_law(const Nelson& m) {
  double s2 = m.sigma * m.sigma;
  return {1.0 + 2.0 * m.lambda / s2, 2.0 * m.lambda * m.a / s2};
}

double stationary_init(const LevyModel& model, RandomStream& rng, int subgrid) {
  if (const auto* m = std::get_if<Nelson>(&model)) {
    InverseGamma law = nelson_stationary_law(*m);
    if (law.scale == 0.0) return 0.0;
    return law.scale / rng.gamma(law.shape, 1.0);
  }
  long burn = burn_in_steps(model, 1.0);
  if (const auto* m = std::get_if<CogarchCPP>(&model))
    return cogarch_run(*m, m->beta / m->c, static_cast<double>(burn), rng);
  DiffusionStepper st(model, 1.0 / checked_subgrid(subgrid));
  double V = 1.0;
  for (long k = 0; k < burn * subgrid; ++k) st.advance(V, rng);
  return V;
}

SkeletonSeries simulate_skeleton_from(const LevyModel& model, double V0, double h, long n, int subgrid,
                                      RandomStream& rng) {
  if (n < 1) throw InvalidConfig("simulate_skeleton: n must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidConfig("simulate_skeleton: h must be > 0");
  SkeletonSeries s;
  s.h = h;
  s.model_id = model_hash(model);
  s.seed = rng.seed();
  s.V.resize(n + 1);
  s.H.resize(n);
  s.I.resize(n);
  s.V[0] = V0;
  double V = V0;

  if (const auto* m = std::get_if<CogarchCPP>(&model)) {
    s.convention = "left_limit";
    double t = 0.0;
    double next = first_arrival(*m, rng);
    for (long k = 0; k < n; ++k) {
      double end = h * static_cast<double>(k + 1);
      double sup = V, inc = 0.0;
      while (next <= end) {
        V = cogarch_decay(*m, V, next - t);
        double z = sample_jump(m->jump_law, rng);
        inc += std::sqrt(V) * z;  // left limit V_{Gamma-}
        sup = std::max(sup, V);
        V *= m->jump_factor(z);
        sup = std::max(sup, V);
        t = next;
        next += rng.exponential(m->mu);
      }
      V = cogarch_decay(*m, V, end - t);
      t = end;
      s.V[k + 1] = V;
      s.H[k] = std::max(sup, V);
      s.I[k] = inc;
    }
    return s;
  }

  int sub = checked_subgrid(subgrid);
  s.subgrid = sub;
  s.convention = "continuous";
  DiffusionStepper st(model, h / sub);
  for (long k = 0; k < n; ++k) {
    double sup = V, inc = 0.0;
    for (int j = 0; j < sub; ++j) {
      double sv = std::sqrt(V);
      inc += sv * st.advance(V, rng);
      sup = std::max(sup, V);
    }
    s.V[k + 1] = V;
    s.H[k] = sup;
    s.I[k] = inc;
  }
  return s;
}

SkeletonSeries simulate_skeleton(const LevyModel& model, double h, long n, int subgrid, RandomStream& rng) {
  if (n < 1) throw InvalidConfig("simulate_skeleton: n must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidConfig("simulate_skeleton: h must be > 0");
  double V0 = stationary_init(model, rng, std::max(subgrid, 1));
  SkeletonSeries s = simulate_skeleton_from(model, V0, h, n, subgrid, rng);
  s.burn_in = std::holds_alternative<Nelson>(model) ? 0 : burn_in_steps(model, 1.0);
  return s;
}

Eigen::ArrayXd simulate_integrated(const LevyModel& model, const Eigen::ArrayXd& t_grid, int subgrid,
                                   RandomStream& rng) {
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    double prev = j == 0 ? 0.0 : t_grid[j - 1];
    if (!(t_grid[j] > prev) || !std::isfinite(t_grid[j]))
      throw InvalidConfig("simulate_integrated: t_grid must be increasing and start after 0");
  }
  Eigen::ArrayXd out(t_grid.size());
  if (t_grid.size() == 0) return out;
  double V = stationary_init(model, rng, std::max(subgrid, 1));
  double I = 0.0;

  if (const auto* m = std::get_if<CogarchCPP>(&model)) {
    double t = 0.0;
    double next = first_arrival(*m, rng);
    for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
      while (next <= t_grid[j]) {
        V = cogarch_decay(*m, V, next - t);
        double z = sample_jump(m->jump_law, rng);
        I += std::sqrt(V) * z;
        V *= m->jump_factor(z);
        t = next;
        next += rng.exponential(m->mu);
      }
      out[j] = I;
    }
    return out;
  }

  int sub = checked_subgrid(subgrid);
  double dt = 1.0 / sub;
  DiffusionStepper st(model, dt);
  long done = 0;
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    double r = t_grid[j] / dt;
    long target = std::lround(r);
    if (std::abs(r - static_cast<double>(target)) > 1e-9 * std::max(1.0, r))
      throw InvalidConfig("simulate_integrated: times must be multiples of 1/subgrid");
    for (; done < target; ++done) {
      double sv = std::sqrt(V);
      I += sv * st.advance(V, rng);
    }
    out[j] = I;
  }
  return out;
}

}  // namespace genou
