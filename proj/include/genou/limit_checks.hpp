#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "genou/extreme_stats.hpp"
#include "genou/levy_models.hpp"

namespace genou {

/// Which sample statistic a rate diagnostic tracks.
enum class RateStatistic { acv_V, acv_I, acf_V, acf_I };

std::string to_string(RateStatistic s);
RateStatistic rate_statistic_from_string(const std::string& s);

/// Expected log-IQR vs log-n slope for the statistic at tail index alpha.
double expected_rate_slope(RateStatistic s, double alpha);

struct ReplicationOptions {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double h = 1.0;
  int subgrid = 4;  // sub-steps per block for the Gaussian families
};

struct RateResult {
  RateStatistic statistic = RateStatistic::acv_V;
  long lag = 1;
  std::vector<long> n_list;
  std::vector<double> iqr;
  double gamma_ref = 0.0;  // mean of the statistic over the largest-n batch
  LinearFit fit;           // log IQR on log n
  double expected = 0.0;
};

/// One series of length n from a given stream.
using SeriesGenerator = std::function<Eigen::ArrayXd(long n, RandomStream& rng)>;

/// Replicates the statistic for each n (stream derive_seed(seed, {n, rep})),
/// takes the IQR of the centred replicates and regresses log IQR on log n.
RateResult rate_diagnostic_series(const SeriesGenerator& gen, RateStatistic statistic, long lag,
                                  const std::vector<long>& n_list, long n_reps, const ReplicationOptions& opt);

/// Model version: simulates stationary skeletons and uses V_{kh} (k >= 1) or I_k.
RateResult rate_diagnostic(const LevyModel& model, RateStatistic statistic, long lag,
                           const std::vector<long>& n_list, long n_reps, const ReplicationOptions& opt);

struct PartialMaximaRow {
  long n = 0;
  double a_n = 0.0;
  double ks = 0.0;
  Eigen::ArrayXd normalized;  // a_n^{-1} M(n) per replicate
};

/// exp(-kappa x^{-alpha}) for x > 0, else 0.
double frechet_cdf(double x, double kappa, double alpha);

/// KS distance between a_n^{-1} sup_{0<=t<=n h} V_t and the Frechet-type limit, per n.
std::vector<PartialMaximaRow> partial_maxima_check(const LevyModel& model, double alpha, double C, double kappa,
                                                   const std::vector<long>& n_list, long n_reps,
                                                   const ReplicationOptions& opt);

struct IntegratedLimitRow {
  double t = 0.0;
  double iqr = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_normal = 0.0;
  double hill = 0.0;  // tail index of |I*_t| / t^{1/(2 alpha)} (stable regime only)
};

struct IntegratedLimitReport {
  std::string regime;  // "normal" (alpha > 1) or "stable" (alpha < 1/2)
  double alpha = 0.0;
  bool symmetric_driver = false;
  std::vector<IntegratedLimitRow> rows;
  double slope = 0.0;           // log IQR vs log t
  double expected_slope = 0.0;  // 1/2 resp. 1/(2 alpha)
  // Gates: normal regime uses skew/kurtosis/KS at the largest t; stable regime
  // uses the Hill index (relative to 2 alpha) and the slope.
  bool gate_skew = false;
  bool gate_kurtosis = false;
  bool gate_ks = false;
  bool gate_hill = false;
  bool gate_slope = false;
  bool pass = false;
};

struct IntegratedLimitTolerances {
  double skew = 0.2;
  double kurtosis = 0.5;
  double ks = 0.05;
  double hill_rel = 0.2;
  double slope = 0.1;
};

/// Throws BoundaryAlpha within 0.05 of 1/2 or 1 and InvalidConfig between them.
IntegratedLimitReport integrated_limit_check(const LevyModel& model, double alpha, const std::vector<double>& t_list,
                                             long n_reps, const ReplicationOptions& opt,
                                             const IntegratedLimitTolerances& tol = {});

}  // namespace genou
