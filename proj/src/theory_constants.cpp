#include "genou/theory_constants.hpp"

#include <array>
#include <numeric>

#include "genou/extreme_stats.hpp"
#include "genou/genou_sim.hpp"

namespace genou {

namespace {

using Row = std::array<double, 4>;

// Sup functionals of exp(-alpha xi) share one path family so that, for a
// fixed seed, shorter windows see a prefix of the same paths.
constexpr std::uint64_t kSupPaths = 11;

// Grid path of xi with window queries by index range.
struct GridWindows {
  GridPath p;

  long lo(double a) const { return static_cast<long>(std::ceil(a / p.dt - 1e-9)); }
  long hi(double b) const {
    return std::min<long>(static_cast<long>(std::floor(b / p.dt + 1e-9)), static_cast<long>(p.xi.size()) - 1);
  }

  // min of xi over grid points in [a, b]; stride 2 keeps only the points of
  // the 2*dt sub-grid.
  double min_xi(double a, double b, int stride = 1) const {
    long i = lo(a), j = hi(b);
    if (stride > 1) i = (i + stride - 1) / stride * stride;
    double m = std::numeric_limits<double>::infinity();
    for (long k = i; k <= j; k += stride) m = std::min(m, p.xi[k]);
    return m;
  }

  double sup_exp(double alpha, double a, double b, int stride = 1) const {
    return std::exp(-alpha * min_xi(a, b, stride));
  }

  // Left-point sum of exp(-xi/2) dL over the steps inside (a, b].
  double integral(double a, double b) const {
    long i = lo(a), j = hi(b);
    double s = 0.0;
    for (long k = i; k < j; ++k) s += std::exp(-0.5 * p.xi[k]) * p.dL[k];
    return s;
  }
};

struct EventWindows {
  EventPath p;

  double sup_exp(double alpha, double a, double b, int = 1) const { return p.sup_exp(alpha, a, b); }

  double integral(double a, double b) const {
    auto it = std::upper_bound(p.times.begin(), p.times.end(), a);
    double s = 0.0;
    for (; it != p.times.end() && *it <= b; ++it) {
      auto k = static_cast<std::size_t>(it - p.times.begin());
      s += std::exp(-0.5 * (p.xi_post[k] + p.log_jumps[k])) * p.jumps[k];
    }
    return s;
  }
};

// Evaluates fn(path) on n_paths independent paths of length `length`. Path i
// draws from derive_seed(seed, {tag, i}) and results come back in index order.
template <class Fn>
std::vector<Row> over_paths(const LevyModel& model, const MonteCarloOptions& opt, std::uint64_t tag,
                            double length, bool with_L, Fn fn) {
  if (opt.n_paths < 2) throw InvalidConfig("Monte Carlo needs n_paths >= 2");
  return parallel_map(static_cast<std::size_t>(opt.n_paths), opt.workers, [&](std::size_t i) -> Row {
    RandomStream rng(derive_seed(opt.seed, {tag, static_cast<std::uint64_t>(i)}));
    if (const auto* m = std::get_if<CogarchCPP>(&model)) {
      EventWindows w{simulate_xi_events(*m, length, rng)};
      return fn(w, rng);
    }
    GridWindows w{simulate_xi_grid(model, length, opt.dt, rng, with_L)};
    return fn(w, rng);
  });
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe column_stats(const std::vector<Row>& rows, int col) {
  double n = static_cast<double>(rows.size());
  double s = 0.0;
  for (const auto& r : rows) s += r[col];
  double mean = s / n;
  double ss = 0.0;
  for (const auto& r : rows) ss += (r[col] - mean) * (r[col] - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Ratio of column means with a delta-method standard error.
MeanSe ratio_stats(const std::vector<Row>& rows, int num, int den) {
  double n = static_cast<double>(rows.size());
  double sn = 0.0, sd = 0.0;
  for (const auto& r : rows) {
    sn += r[num];
    sd += r[den];
  }
  double ratio = sn / sd, md = sd / n;
  double ss = 0.0;
  for (const auto& r : rows) {
    double e = r[num] - ratio * r[den];
    ss += e * e;
  }
  return {ratio, std::sqrt(ss / (n - 1.0) / n) / md};
}

double richardson(double fine, double coarse) {
  const double r = std::sqrt(2.0);
  return (r * fine - coarse) / (r - 1.0);
}

double resolve_horizon(const LevyModel& model, double alpha, const MonteCarloOptions& opt,
                       std::vector<std::string>& warnings) {
  double dflt = default_truncation_horizon(model, alpha);
  if (opt.horizon <= 0.0) return dflt;
  if (opt.horizon < dflt) {
    double bound = std::exp(opt.horizon * laplace_exponent(model, alpha / 2.0));
    warnings.push_back("horizon " + std::to_string(opt.horizon) + " below default " + std::to_string(dflt) +
                       "; truncation bound exp(T Psi(alpha/2)) = " + std::to_string(bound));
  }
  return opt.horizon;
}

TheoryConstant base_constant(const LevyModel& model, std::string label, const MonteCarloOptions& opt,
                             double horizon) {
  TheoryConstant c;
  c.label = std::move(label);
  c.n_paths = opt.n_paths;
  c.horizon = horizon;
  c.dt = is_event_driven(model) ? 0.0 : opt.dt;
  return c;
}

void require_root(const LevyModel& model, double alpha, const char* what) {
  double psi = laplace_exponent(model, alpha);
  if (!(std::abs(psi) <= 1e-9))
    throw PreconditionViolated(std::string(what) + ": requires Psi(alpha) = 0, got " + std::to_string(psi));
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidConfig(std::string(what) + " must be > 0");
}

}  // namespace

IdentityCheck make_identity_check(TheoryConstant lhs, TheoryConstant rhs, double z_limit) {
  IdentityCheck c;
  double se = std::sqrt(lhs.std_error * lhs.std_error + rhs.std_error * rhs.std_error);
  double diff = lhs.value - rhs.value;
  c.z_score = diff == 0.0 ? 0.0 : diff / se;
  c.pass = std::abs(c.z_score) <= z_limit;
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  return c;
}

double default_truncation_horizon(const LevyModel& model, double alpha) {
  double psi = laplace_exponent(model, alpha / 2.0);
  if (!(psi < 0.0)) throw PreconditionViolated("truncation horizon needs Psi(alpha/2) < 0");
  return std::log(1e4) / -psi;
}

TheoryConstant mc_sup_exponent(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt) {
  require_positive(h, "mc_sup_exponent: h");
  auto rows = over_paths(model, opt, kSupPaths, h, false, [&](const auto& w, RandomStream&) {
    return Row{w.sup_exp(alpha, 0.0, h), w.sup_exp(alpha, 0.0, h, 2), 0.0, 0.0};
  });
  TheoryConstant c = base_constant(model, "sup_exponent", opt, h);
  MeanSe s = column_stats(rows, 0);
  c.value = s.mean;
  c.std_error = s.se;
  if (c.dt > 0.0) {
    c.coarse_value = column_stats(rows, 1).mean;
    c.extrapolated = richardson(c.value, c.coarse_value);
  }
  return c;
}

TheoryConstant frechet_constant(const LevyModel& model, double alpha, const MonteCarloOptions& opt) {
  TheoryConstant c = base_constant(model, "frechet_constant", opt, 0.0);
  double T = resolve_horizon(model, alpha, opt, c.warnings);
  c.horizon = T;
  auto rows = over_paths(model, opt, kSupPaths, 1.0 + T, false, [&](const auto& w, RandomStream&) {
    double f = std::max(w.sup_exp(alpha, 0.0, 1.0) - w.sup_exp(alpha, 1.0, 1.0 + T), 0.0);
    double g = std::max(w.sup_exp(alpha, 0.0, 1.0, 2) - w.sup_exp(alpha, 1.0, 1.0 + T, 2), 0.0);
    return Row{f, g, 0.0, 0.0};
  });
  MeanSe s = column_stats(rows, 0);
  c.value = s.mean;
  c.std_error = s.se;
  if (c.dt > 0.0) {
    c.coarse_value = column_stats(rows, 1).mean;
    c.extrapolated = richardson(c.value, c.coarse_value);
  }
  return c;
}

TheoryConstant extremal_index_V(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt) {
  require_positive(h, "extremal_index_V: h");
  TheoryConstant c = base_constant(model, "extremal_index_V", opt, 0.0);
  double T = resolve_horizon(model, alpha, opt, c.warnings);
  c.horizon = T;
  double length = std::max(h, 1.0 + T);
  auto rows = over_paths(model, opt, kSupPaths, length, false, [&](const auto& w, RandomStream&) {
    double f = std::max(w.sup_exp(alpha, 0.0, 1.0) - w.sup_exp(alpha, 1.0, 1.0 + T), 0.0);
    double fc = std::max(w.sup_exp(alpha, 0.0, 1.0, 2) - w.sup_exp(alpha, 1.0, 1.0 + T, 2), 0.0);
    return Row{f, w.sup_exp(alpha, 0.0, h), fc, w.sup_exp(alpha, 0.0, h, 2)};
  });
  MeanSe r = ratio_stats(rows, 0, 1);
  c.value = h * r.mean;
  c.std_error = h * r.se;
  if (c.dt > 0.0) {
    c.coarse_value = h * ratio_stats(rows, 2, 3).mean;
    c.extrapolated = richardson(c.value, c.coarse_value);
  }
  if (c.value > 1.0) c.warnings.push_back("theta estimate above 1");
  return c;
}

TheoryConstant extremal_index_I(const LevyModel& model, double alpha, double h, int K,
                                const MonteCarloOptions& opt) {
  require_positive(h, "extremal_index_I: h");
  if (K < 2) throw InvalidConfig("extremal_index_I: K must be >= 2");
  TheoryConstant c = base_constant(model, "extremal_index_I", opt, h * K);
  auto rows = over_paths(model, opt, 14, 2.0 * K * h, true, [&](const auto& w, RandomStream&) {
    auto y = [&](int k) {
      double v = w.integral((k - 1) * h, k * h);
      return v > 0.0 ? std::pow(v, 2.0 * alpha) : 0.0;
    };
    double y1 = y(1), mK = 0.0, m2K = 0.0;
    for (int k = 2; k <= 2 * K; ++k) {
      double v = y(k);
      if (k <= K) mK = std::max(mK, v);
      m2K = std::max(m2K, v);
    }
    return Row{std::max(y1 - mK, 0.0), y1, std::max(y1 - m2K, 0.0), 0.0};
  });
  MeanSe r = ratio_stats(rows, 0, 1);
  c.value = r.mean;
  c.std_error = r.se;
  double doubled = ratio_stats(rows, 2, 1).mean;
  if (std::abs(doubled - c.value) > c.std_error)
    c.warnings.push_back("K-truncation: value changes by more than one SE when K is doubled");
  return c;
}

TheoryConstant tail_constant_I(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt) {
  require_positive(h, "tail_constant_I: h");
  auto rows = over_paths(model, opt, 15, h, true, [&](const auto& w, RandomStream&) {
    double v = w.integral(0.0, h);
    return Row{v > 0.0 ? std::pow(v, 2.0 * alpha) : 0.0, 0.0, 0.0, 0.0};
  });
  TheoryConstant c = base_constant(model, "tail_constant_I", opt, h);
  MeanSe s = column_stats(rows, 0);
  c.value = s.mean;
  c.std_error = s.se;
  return c;
}

TheoryConstant empirical_tail_scale(const Eigen::Ref<const Eigen::ArrayXd>& data, double alpha, double q,
                                    int batches) {
  if (data.size() < 2 * batches) throw InsufficientData("empirical_tail_scale: sample too short");
  double x = quantile(data, q);
  double xa = std::pow(x, alpha);
  TheoryConstant c;
  c.label = "tail_scale_C";
  c.value = xa * static_cast<double>((data > x).count()) / static_cast<double>(data.size());
  Eigen::Index len = data.size() / batches;
  Eigen::ArrayXd est(batches);
  for (int b = 0; b < batches; ++b)
    est[b] = xa * static_cast<double>((data.segment(b * len, len) > x).count()) / static_cast<double>(len);
  double m = est.mean();
  c.std_error = std::sqrt((est - m).square().sum() / (batches - 1.0) / batches);
  c.n_paths = static_cast<long>(data.size());
  return c;
}

TheoryConstant tail_scale_C(const LevyModel& model, double alpha, const TailScaleOptions& opt) {
  if (const auto* m = std::get_if<Nelson>(&model)) {
    InverseGamma law = nelson_stationary_law(*m);
    TheoryConstant c;
    c.label = "tail_scale_C";
    c.value = std::exp(law.shape * std::log(law.scale) - std::log(law.shape) - std::lgamma(law.shape));
    return c;
  }
  RandomStream rng(derive_seed(opt.seed, {16}));
  SkeletonSeries s = simulate_skeleton(model, opt.h, opt.n, kDefaultSubgrid, rng);
  Eigen::ArrayXd V = s.V.tail(opt.n);
  double k0 = static_cast<double>(opt.n) * (1.0 - opt.q);
  std::vector<double> hills;
  for (double f : {0.25, 0.5, 1.0, 2.0}) {
    long k = std::max<long>(2, std::lround(f * k0));
    hills.push_back(hill_estimator(V, k).alpha_hat);
  }
  auto [lo, hi] = std::minmax_element(hills.begin(), hills.end());
  std::vector<double> sorted = hills;
  std::sort(sorted.begin(), sorted.end());
  double med = 0.5 * (sorted[1] + sorted[2]);
  if ((*hi - *lo) / med > opt.plateau_tol)
    throw EstimationUnstable("tail_scale_C: Hill estimates show no plateau (spread " +
                             std::to_string((*hi - *lo) / med) + ")");
  TheoryConstant c = empirical_tail_scale(V, alpha, opt.q);
  c.horizon = opt.h * static_cast<double>(opt.n);
  c.warnings.push_back("empirical tail scale; Hill plateau median " + std::to_string(med));
  return c;
}

double normalizer_a_n(double C, double alpha, double n) {
  if (!(C > 0.0) || !(alpha > 0.0) || !(n >= 1.0)) throw DomainError("normalizer_a_n: need C > 0, alpha > 0, n >= 1");
  return std::pow(C * n, 1.0 / alpha);
}

IdentityCheck h_scaling_identity_sides(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt) {
  require_positive(h, "h_scaling_identity: h");
  std::vector<std::string> warnings;
  double T = resolve_horizon(model, alpha, opt, warnings);
  auto window = [&](double w0, std::uint64_t tag) {
    return over_paths(model, opt, tag, w0 + T, false, [&](const auto& w, RandomStream&) {
      return Row{std::max(w.sup_exp(alpha, 0.0, w0) - w.sup_exp(alpha, w0, w0 + T), 0.0), 0.0, 0.0, 0.0};
    });
  };
  TheoryConstant lhs = base_constant(model, "h_scaling_lhs", opt, T);
  TheoryConstant rhs = base_constant(model, "h_scaling_rhs", opt, T);
  lhs.warnings = rhs.warnings = warnings;
  auto lrows = window(h, 21);
  MeanSe l = column_stats(lrows, 0);
  lhs.value = l.mean;
  lhs.std_error = l.se;
  MeanSe r = h == 1.0 ? l : column_stats(window(1.0, 22), 0);
  rhs.value = h * r.mean;
  rhs.std_error = h * r.se;
  return make_identity_check(std::move(lhs), std::move(rhs));
}

IdentityCheck verify_h_scaling_identity(const LevyModel& model, double alpha, double h, const MonteCarloOptions& opt) {
  require_root(model, alpha, "verify_h_scaling_identity");
  return h_scaling_identity_sides(model, alpha, h, opt);
}

double first_arrival_transform(const CogarchCPP& model, double alpha) {
  return model.mu / (model.mu + alpha * model.c);
}

IdentityCheck verify_first_arrival_identity(const CogarchCPP& model, double alpha, const MonteCarloOptions& opt) {
  LevyModel lm = model;
  require_root(lm, alpha, "verify_first_arrival_identity");
  if (!(model.mu > 0.0)) throw PreconditionViolated("verify_first_arrival_identity: needs mu > 0");
  MonteCarloOptions lopt = opt;
  TheoryConstant lhs = frechet_constant(lm, alpha, lopt);
  lhs.label = "first_arrival_lhs";
  double T = lhs.horizon;

  double factor = model.mu / first_arrival_transform(model, alpha);
  auto rows = parallel_map(static_cast<std::size_t>(opt.n_paths), opt.workers, [&](std::size_t i) -> Row {
    RandomStream rng(derive_seed(opt.seed, {23, static_cast<std::uint64_t>(i)}));
    double g1 = rng.exponential(model.mu);
    double xi1 = model.c * g1 - std::log(model.jump_factor(sample_jump(model.jump_law, rng)));
    EventPath fresh = simulate_xi_events(model, T, rng);
    double sup = std::exp(-alpha * xi1) * fresh.sup_exp(alpha, 0.0, T);
    return Row{factor * std::max(1.0 - sup, 0.0), 0.0, 0.0, 0.0};
  });
  TheoryConstant rhs = base_constant(lm, "first_arrival_rhs", opt, T);
  MeanSe r = column_stats(rows, 0);
  rhs.value = r.mean;
  rhs.std_error = r.se;
  rhs.warnings = lhs.warnings;
  return make_identity_check(std::move(lhs), std::move(rhs));
}

}  // namespace genou
