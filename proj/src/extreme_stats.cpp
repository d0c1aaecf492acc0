#include "genou/extreme_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genou/random.hpp"

namespace genou {

namespace {

std::vector<double> to_vector(const ConstArrayRef& x) { return {x.data(), x.data() + x.size()}; }

// Continued fraction for the regularized incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lbt) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(lbt) * beta_cf(b, a, 1.0 - x) / b;
}

struct Exceedances {
  std::vector<char> flag;
  long count = 0;
};

Exceedances exceedances(const ConstArrayRef& data, double threshold) {
  Exceedances e;
  e.flag.resize(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    e.flag[i] = data[i] > threshold;
    e.count += e.flag[i];
  }
  return e;
}

void require_exceedances(long count, const char* what) {
  if (count == 0) throw NoExceedances(std::string(what) + ": no observation exceeds the threshold");
  if (count < 50)
    throw TooFewExceedances(std::string(what) + ": " + std::to_string(count) + " exceedances, need >= 50");
}

// Cluster sizes for runs separated by at least `gap` non-exceedances in [begin, end).
std::vector<long> run_clusters(const std::vector<char>& flag, std::size_t begin, std::size_t end, long gap) {
  std::vector<long> sizes;
  long since = 0;
  bool open = false;
  for (std::size_t i = begin; i < end; ++i) {
    if (flag[i]) {
      if (!open || since >= gap) {
        sizes.push_back(0);
        open = true;
      }
      ++sizes.back();
      since = 0;
    } else {
      ++since;
    }
  }
  return sizes;
}

// Bootstrap SE of sum(num)/sum(den) over resampled blocks.
double block_bootstrap_se(const std::vector<double>& num, const std::vector<double>& den, std::uint64_t seed,
                          int resamples = 200) {
  std::size_t nb = num.size();
  if (nb < 2) return 0.0;
  RandomStream rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
  std::vector<double> stats;
  stats.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    double sn = 0.0, sd = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t j = pick(rng.engine());
      sn += num[j];
      sd += den[j];
    }
    if (sd > 0.0) stats.push_back(std::min(sn / sd, 1.0));
  }
  if (stats.size() < 2) return 0.0;
  double m = std::accumulate(stats.begin(), stats.end(), 0.0) / stats.size();
  double ss = 0.0;
  for (double s : stats) ss += (s - m) * (s - m);
  return std::sqrt(ss / (stats.size() - 1.0));
}

}  // namespace

double quantile(const ConstArrayRef& x, double p) {
  if (x.size() == 0) throw InsufficientData("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::vector<double> v = to_vector(x);
  double pos = p * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  double frac = pos - static_cast<double>(lo);
  std::nth_element(v.begin(), v.begin() + lo, v.end());
  double a = v[lo];
  if (frac == 0.0 || lo + 1 >= v.size()) return a;
  double b = *std::min_element(v.begin() + lo + 1, v.end());
  return a + frac * (b - a);
}

double iqr(const ConstArrayRef& x) { return quantile(x, 0.75) - quantile(x, 0.25); }

double sample_skewness(const ConstArrayRef& x) {
  double m = x.mean();
  double m2 = (x - m).square().mean();
  double m3 = (x - m).cube().mean();
  return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(const ConstArrayRef& x) {
  double m = x.mean();
  double m2 = (x - m).square().mean();
  double m4 = (x - m).square().square().mean();
  return m4 / (m2 * m2) - 3.0;
}

double ks_distance(const ConstArrayRef& x, const std::function<double(double)>& cdf) {
  std::vector<double> v = to_vector(x);
  std::sort(v.begin(), v.end());
  double n = static_cast<double>(v.size()), d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double F = cdf(v[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_two_sample(const ConstArrayRef& x, const ConstArrayRef& y) {
  std::vector<double> a = to_vector(x), b = to_vector(y);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_two_sample_pvalue(double d, double n, double m) {
  double en = std::sqrt(n * m / (n + m));
  return kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double student_t_cdf(double t, double nu) {
  double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p must lie in (0, 1)");
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, nu) > p) lo *= 2.0;
  while (student_t_cdf(hi, nu) < p) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, nu) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LinearFit ols_fit(const ConstArrayRef& x, const ConstArrayRef& y) {
  if (x.size() != y.size() || x.size() < 3) throw InsufficientData("ols_fit needs >= 3 paired points");
  double n = static_cast<double>(x.size());
  double mx = x.mean(), my = y.mean();
  double sxx = (x - mx).square().sum();
  if (!(sxx > 0.0)) throw InsufficientData("ols_fit: x has no spread");
  LinearFit f;
  f.slope = ((x - mx) * (y - my)).sum() / sxx;
  f.intercept = my - f.slope * mx;
  double rss = (y - f.intercept - f.slope * x).square().sum();
  f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  double t = student_t_quantile(0.975, n - 2.0);
  f.ci_low = f.slope - t * f.slope_se;
  f.ci_high = f.slope + t * f.slope_se;
  return f;
}

long default_hill_k(Eigen::Index n) { return static_cast<long>(std::floor(std::pow(static_cast<double>(n), 0.6))); }

TailEstimate hill_estimator(const ConstArrayRef& data, long k_order) {
  if (k_order < 2 || data.size() < k_order + 1)
    throw InsufficientData("hill_estimator: need k >= 2 and at least k+1 observations");
  std::vector<double> v = to_vector(data);
  auto kth = v.begin() + k_order;
  std::nth_element(v.begin(), kth, v.end(), std::greater<>());
  double xk = *kth;
  if (!(xk > 0.0)) throw NonPositiveData("hill_estimator: the k+1 largest values must be positive");
  std::sort(v.begin(), kth, std::greater<>());
  double s = 0.0;
  for (auto it = v.begin(); it != kth; ++it) s += std::log(*it / xk);
  if (!(s > 0.0)) throw InsufficientData("hill_estimator: upper order statistics are all equal");
  TailEstimate t;
  t.k_order = k_order;
  t.alpha_hat = static_cast<double>(k_order) / s;
  t.se = t.alpha_hat / std::sqrt(static_cast<double>(k_order));
  t.threshold = xk;
  return t;
}

std::vector<TailEstimate> hill_path(const ConstArrayRef& data, const std::vector<long>& ks) {
  std::vector<double> v = to_vector(data);
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<TailEstimate> out;
  for (long k : ks) {
    if (k < 2 || static_cast<std::size_t>(k) + 1 > v.size()) throw InsufficientData("hill_path: k out of range");
    double xk = v[k];
    if (!(xk > 0.0)) throw NonPositiveData("hill_path: non-positive order statistic");
    double s = 0.0;
    for (long i = 0; i < k; ++i) s += std::log(v[i] / xk);
    if (!(s > 0.0)) throw InsufficientData("hill_path: upper order statistics are all equal");
    double a = static_cast<double>(k) / s;
    out.push_back({a, k, a / std::sqrt(static_cast<double>(k)), xk});
  }
  return out;
}

double tail_ratio(const ConstArrayRef& num, const ConstArrayRef& den, double q, TailTransform transform,
                  long min_exceedances) {
  double x = quantile(num, q);
  double xd = transform == TailTransform::square ? x * x : x;
  long cn = (num > x).count(), cd = (den > xd).count();
  if (cn < min_exceedances || cd < min_exceedances)
    throw TooFewExceedances("tail_ratio: " + std::to_string(cn) + " / " + std::to_string(cd) +
                            " exceedances, need >= " + std::to_string(min_exceedances));
  return (static_cast<double>(cn) / static_cast<double>(num.size())) /
         (static_cast<double>(cd) / static_cast<double>(den.size()));
}

long default_block_len(Eigen::Index n) { return static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))); }

double default_threshold(const ConstArrayRef& data) { return quantile(data, 0.98); }

ExtremalIndexEstimate extremal_index_blocks(const ConstArrayRef& data, double threshold, long block_len,
                                            std::uint64_t bootstrap_seed) {
  if (block_len < 1) throw InvalidConfig("extremal_index_blocks: block_len must be >= 1");
  long nb = static_cast<long>(data.size()) / block_len;
  if (nb < 1) throw InsufficientData("extremal_index_blocks: fewer observations than one block");
  Exceedances e = exceedances(data.head(nb * block_len), threshold);
  if (e.count == 0) throw NoExceedances("extremal_index_blocks: no observation exceeds the threshold");
  std::vector<double> hit(nb, 0.0), cnt(nb, 0.0);
  for (long b = 0; b < nb; ++b) {
    for (long i = b * block_len; i < (b + 1) * block_len; ++i) cnt[b] += e.flag[i];
    hit[b] = cnt[b] > 0.0 ? 1.0 : 0.0;
  }
  require_exceedances(e.count, "extremal_index_blocks");
  ExtremalIndexEstimate est;
  est.method = "blocks";
  est.threshold = threshold;
  est.block_len = block_len;
  est.n_exceedances = e.count;
  est.n_clusters = static_cast<long>(std::accumulate(hit.begin(), hit.end(), 0.0));
  est.theta_hat = std::min(static_cast<double>(est.n_clusters) / static_cast<double>(e.count), 1.0);
  est.se = block_bootstrap_se(hit, cnt, bootstrap_seed);
  return est;
}

ExtremalIndexEstimate extremal_index_runs(const ConstArrayRef& data, double threshold, long run_len,
                                          std::uint64_t bootstrap_seed) {
  if (run_len < 1) throw InvalidConfig("extremal_index_runs: run length must be >= 1");
  Exceedances e = exceedances(data, threshold);
  require_exceedances(e.count, "extremal_index_runs");
  auto all = run_clusters(e.flag, 0, e.flag.size(), run_len);
  ExtremalIndexEstimate est;
  est.method = "runs";
  est.threshold = threshold;
  est.block_len = run_len;
  est.n_exceedances = e.count;
  est.n_clusters = static_cast<long>(all.size());
  est.theta_hat = std::min(static_cast<double>(all.size()) / static_cast<double>(e.count), 1.0);

  std::size_t len = std::max<std::size_t>(static_cast<std::size_t>(run_len),
                                          static_cast<std::size_t>(default_block_len(data.size())));
  std::vector<double> clusters, counts;
  for (std::size_t b = 0; b + len <= e.flag.size(); b += len) {
    auto sizes = run_clusters(e.flag, b, b + len, run_len);
    clusters.push_back(static_cast<double>(sizes.size()));
    counts.push_back(static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), 0L)));
  }
  est.se = block_bootstrap_se(clusters, counts, bootstrap_seed);
  return est;
}

ClusterSizes cluster_size_distribution(const ConstArrayRef& data, double threshold, long run_gap) {
  if (run_gap < 1) throw InvalidConfig("cluster_size_distribution: run_gap must be >= 1");
  Exceedances e = exceedances(data, threshold);
  require_exceedances(e.count, "cluster_size_distribution");
  auto sizes = run_clusters(e.flag, 0, e.flag.size(), run_gap);
  ClusterSizes c;
  c.n_clusters = static_cast<long>(sizes.size());
  for (long s : sizes) ++c.histogram[s];
  double n = static_cast<double>(sizes.size());
  c.mean_size = static_cast<double>(e.count) / n;
  if (sizes.size() > 1) {
    double ss = 0.0;
    for (long s : sizes) ss += (s - c.mean_size) * (s - c.mean_size);
    c.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return c;
}

double acv_at(const ConstArrayRef& data, long lag) {
  const long n = static_cast<long>(data.size());
  double s = 0.0;
  for (long k = 0; k + lag < n; ++k) s += data[k] * data[k + lag];
  return s / static_cast<double>(n);
}

AcfEstimate sample_acv(const ConstArrayRef& data, long max_lag, bool mean_correct) {
  const long n = static_cast<long>(data.size());
  if (max_lag < 0 || 2 * max_lag >= n) throw InsufficientData("sample_acv: need 0 <= max_lag < n/2");
  Eigen::ArrayXd x = mean_correct ? Eigen::ArrayXd(data - data.mean()) : Eigen::ArrayXd(data);
  AcfEstimate a;
  a.n = n;
  for (long l = 0; l <= max_lag; ++l) {
    a.lags.push_back(l);
    a.gamma_hat.push_back(acv_at(x, l));
  }
  for (double g : a.gamma_hat) a.rho_hat.push_back(g / a.gamma_hat[0]);
  return a;
}

}  // namespace genou
