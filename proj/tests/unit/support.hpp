#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

// Sample mean and its standard error.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& x) {
  double n = static_cast<double>(x.size()), s = 0.0, ss = 0.0;
  for (double v : x) s += v;
  double m = s / n;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

inline bool within_se(const MeanSe& m, double target, double k = 3.0) {
  return std::abs(m.mean - target) <= k * m.se;
}

inline Eigen::ArrayXd to_array(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
