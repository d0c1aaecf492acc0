#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "genou/errors.hpp"

namespace genou {

using ConstArrayRef = Eigen::Ref<const Eigen::ArrayXd>;

// Descriptive statistics.

/// Linear-interpolation quantile (type 7).
double quantile(const ConstArrayRef& x, double p);
double iqr(const ConstArrayRef& x);
double sample_skewness(const ConstArrayRef& x);
double excess_kurtosis(const ConstArrayRef& x);

/// sup |F_n - F| against a continuous CDF.
double ks_distance(const ConstArrayRef& x, const std::function<double(double)>& cdf);
double ks_two_sample(const ConstArrayRef& x, const ConstArrayRef& y);
/// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_sf(double lambda);
/// Asymptotic p-value of the two-sample KS statistic d for sizes n and m.
double ks_two_sample_pvalue(double d, double n, double m);

double normal_cdf(double x);
/// Student-t CDF with nu degrees of freedom.
double student_t_cdf(double t, double nu);
double student_t_quantile(double p, double nu);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;   // 95% t-interval
  double ci_high = 0.0;
};
LinearFit ols_fit(const ConstArrayRef& x, const ConstArrayRef& y);

// Tail index.

struct TailEstimate {
  double alpha_hat = 0.0;
  long k_order = 0;
  double se = 0.0;
  double threshold = 0.0;  // X_(k+1)
};

TailEstimate hill_estimator(const ConstArrayRef& data, long k_order);
/// Default k = floor(n^0.6).
long default_hill_k(Eigen::Index n);
/// Hill estimates for each k in ks, sorting the sample once.
std::vector<TailEstimate> hill_path(const ConstArrayRef& data, const std::vector<long>& ks);

enum class TailTransform { identity, square };

/// P(num > x_q) / P(den > T(x_q)) with x_q the q-quantile of num.
double tail_ratio(const ConstArrayRef& num, const ConstArrayRef& den, double q,
                  TailTransform transform = TailTransform::identity, long min_exceedances = 200);

// Extremal index and clusters.

struct ExtremalIndexEstimate {
  double theta_hat = 0.0;
  std::string method;  // "blocks" or "runs"
  double threshold = 0.0;
  long block_len = 0;  // run length for the runs method
  double se = 0.0;
  long n_exceedances = 0;
  long n_clusters = 0;
};

/// Default block length ceil(sqrt(n)); default threshold the 98% quantile.
long default_block_len(Eigen::Index n);
double default_threshold(const ConstArrayRef& data);

/// (# blocks with an exceedance) / (# exceedances) over full blocks; standard
/// error from 200 block-bootstrap resamples.
ExtremalIndexEstimate extremal_index_blocks(const ConstArrayRef& data, double threshold, long block_len,
                                            std::uint64_t bootstrap_seed = 7);

/// Clusters separated by at least run_len sub-threshold values; standard error
/// from a block bootstrap with blocks of length max(run_len, sqrt n).
ExtremalIndexEstimate extremal_index_runs(const ConstArrayRef& data, double threshold, long run_len,
                                          std::uint64_t bootstrap_seed = 7);

struct ClusterSizes {
  std::map<long, long> histogram;  // cluster size -> count
  double mean_size = 0.0;
  double se = 0.0;
  long n_clusters = 0;
};

inline constexpr long kInfiniteGap = std::numeric_limits<long>::max();

ClusterSizes cluster_size_distribution(const ConstArrayRef& data, double threshold, long run_gap);

// Sample autocovariance.

struct AcfEstimate {
  std::vector<long> lags;
  std::vector<double> gamma_hat;
  std::vector<double> rho_hat;
  long n = 0;
};

/// gamma(l) = (1/n) sum_{k < n-l} x_k x_{k+l} for l = 0..max_lag, optionally
/// on mean-corrected data. rho is not clamped.
AcfEstimate sample_acv(const ConstArrayRef& data, long max_lag, bool mean_correct = false);
/// gamma(lag) alone, same arithmetic as sample_acv.
double acv_at(const ConstArrayRef& data, long lag);

}  // namespace genou
