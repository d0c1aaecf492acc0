#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "genou/levy_models.hpp"

namespace genou {

/// One draw of the random affine map V -> A V + B over a window of length h.
struct RecurrenceCoeffs {
  double A = 1.0;
  double B = 0.0;
};

/// Sub-steps per unit time used when none is given.
inline constexpr int kDefaultSubgrid = 32;

/// Exact for the COGARCH driver; for the Gaussian families xi is exact on the
/// h/subgrid grid and the eta-integral uses the trapezoidal rule.
RecurrenceCoeffs sample_recurrence_coeffs(const LevyModel& model, double h, RandomStream& rng,
                                          int subgrid = kDefaultSubgrid);

/// ceil(30 / (-Psi(alpha/2) h)), capped at 1e5. Falls back to Psi(1) when
/// Psi has no positive root.
long burn_in_steps(const LevyModel& model, double h);

/// Draw from the stationary law of V. Nelson: exact inverse-gamma. Others:
/// burn_in_steps(model, 1) unit windows of the recurrence from beta/c (resp. 1).
double stationary_init(const LevyModel& model, RandomStream& rng, int subgrid = kDefaultSubgrid);

/// Parameters (shape, scale) of the inverse-gamma stationary law of the Nelson diffusion.
struct InverseGamma {
  double shape = 0.0;
  double scale = 0.0;
};
InverseGamma nelson_stationary_law(const Nelson& model);

struct SkeletonSeries {
  double h = 1.0;
  Eigen::ArrayXd V;  // n + 1 values V_{kh}, k = 0..n
  Eigen::ArrayXd H;  // block suprema H_k, k = 1..n
  Eigen::ArrayXd I;  // block increments I_k, k = 1..n
  std::string model_id;
  std::uint64_t seed = 0;
  long burn_in = 0;
  int subgrid = 0;  // 0 when event-exact
  // "left_limit" for jump-driven V, "continuous" when V has no jumps.
  std::string convention;

  Eigen::Index size() const { return H.size(); }
};

/// Stationary series of length n on the h-grid. `subgrid` is the number of
/// sub-steps per block and is ignored for the COGARCH driver.
SkeletonSeries simulate_skeleton(const LevyModel& model, double h, long n, int subgrid, RandomStream& rng);

/// Same as simulate_skeleton but starting from the given V0 (no burn-in).
SkeletonSeries simulate_skeleton_from(const LevyModel& model, double V0, double h, long n, int subgrid,
                                      RandomStream& rng);

/// I*_t at each t in t_grid, starting from a stationary V0. Gaussian families
/// use step 1/subgrid; the times must be multiples of it.
Eigen::ArrayXd simulate_integrated(const LevyModel& model, const Eigen::ArrayXd& t_grid, int subgrid,
                                   RandomStream& rng);

}  // namespace genou
