#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "genou/limit_checks.hpp"

namespace genou {

struct HillPlotData {
  std::string name;
  std::vector<double> k;
  std::vector<double> alpha_hat;
  double reference = 0.0;  // theoretical index drawn as a horizontal line
};

struct CdfOverlayData {
  std::string name;
  Eigen::ArrayXd sample;
  double kappa = 0.0;
  double alpha = 0.0;
};

struct PlotArtifacts {
  std::vector<HillPlotData> hill;
  std::vector<RateResult> rates;
  std::vector<CdfOverlayData> cdfs;

  bool empty() const { return hill.empty() && rates.empty() && cdfs.empty(); }
};

/// x-range of a CDF overlay: the 1% and 99% sample quantiles.
std::pair<double, double> cdf_overlay_range(const Eigen::ArrayXd& sample);

std::string hill_plot_svg(const HillPlotData& d);
std::string rate_plot_svg(const RateResult& r);
std::string cdf_overlay_svg(const CdfOverlayData& d);

/// File stem used for a rate regression plot, one per (statistic, lag).
std::string rate_plot_name(const RateResult& r);

}  // namespace genou
