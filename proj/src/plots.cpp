#include "genou/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "genou/extreme_stats.hpp"

namespace genou {

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Minimal line-chart canvas in data coordinates.
class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) y1_ = y0_ + 1.0;
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0_) / (y1_ - y0_) * (kH - kTop - kBottom); }

  void polyline(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
                bool dashed = false) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (dashed) body_ << " stroke-dasharray=\"6,4\"";
    body_ << " points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) body_ << num(px(x[i])) << ',' << num(py(y[i])) << ' ';
    body_ << "\"/>\n";
  }

  void points(const std::vector<double>& x, const std::vector<double>& y, const std::string& color) {
    for (std::size_t i = 0; i < x.size(); ++i)
      body_ << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(py(y[i])) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
  }

  std::string render(const std::string& title, const std::string& xlabel, const std::string& ylabel) const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    double bx = kLeft, by = kH - kBottom;
    s << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << kW - kRight << "\" y2=\"" << by
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx << "\" y2=\"" << kTop << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      double fx = x0_ + (x1_ - x0_) * i / 4.0, fy = y0_ + (y1_ - y0_) * i / 4.0;
      s << "<text x=\"" << num(px(fx)) << "\" y=\"" << by + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << num(fx) << "</text>\n";
      s << "<text x=\"" << bx - 6 << "\" y=\"" << num(py(fy) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << num(fy) << "</text>\n";
    }
    s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
    s << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << kH / 2 << ")\">" << ylabel << "</text>\n";
    s << body_.str() << "</svg>\n";
    return s.str();
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

std::pair<double, double> bounds(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double pad = 0.05 * (*hi - *lo + 1e-12);
  return {*lo - pad, *hi + pad};
}

}  // namespace

std::pair<double, double> cdf_overlay_range(const Eigen::ArrayXd& sample) {
  return {quantile(sample, 0.01), quantile(sample, 0.99)};
}

std::string hill_plot_svg(const HillPlotData& d) {
  std::vector<double> ys = d.alpha_hat;
  ys.push_back(d.reference);
  auto [y0, y1] = bounds(ys);
  auto [x0, x1] = bounds(d.k);
  Canvas c(x0, x1, y0, y1);
  c.polyline(d.k, d.alpha_hat, "steelblue");
  c.polyline({x0, x1}, {d.reference, d.reference}, "firebrick", true);
  return c.render("Hill plot: " + d.name, "k (upper order statistics)", "alpha_hat");
}

std::string rate_plot_name(const RateResult& r) { return "rate_" + to_string(r.statistic) + "_lag" + std::to_string(r.lag); }

std::string rate_plot_svg(const RateResult& r) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.n_list.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(r.n_list[i])));
    ly.push_back(std::log(r.iqr[i]));
  }
  auto [x0, x1] = bounds(lx);
  auto [y0, y1] = bounds(ly);
  Canvas c(x0, x1, y0, y1);
  c.points(lx, ly, "steelblue");
  c.polyline({x0, x1}, {r.fit.intercept + r.fit.slope * x0, r.fit.intercept + r.fit.slope * x1}, "firebrick");
  return c.render(to_string(r.statistic) + " lag " + std::to_string(r.lag) + ": slope " + num(r.fit.slope) +
                      " (expected " + num(r.expected) + ")",
                  "log n", "log IQR");
}

std::string cdf_overlay_svg(const CdfOverlayData& d) {
  auto [x0, x1] = cdf_overlay_range(d.sample);
  std::vector<double> s(d.sample.data(), d.sample.data() + d.sample.size());
  std::sort(s.begin(), s.end());
  std::vector<double> ex, ey, tx, ty;
  double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < x0 || s[i] > x1) continue;
    ex.push_back(s[i]);
    ey.push_back((i + 1) / n);
  }
  for (int i = 0; i <= 200; ++i) {
    double x = x0 + (x1 - x0) * i / 200.0;
    tx.push_back(x);
    ty.push_back(frechet_cdf(x, d.kappa, d.alpha));
  }
  Canvas c(x0, x1, 0.0, 1.0);
  c.polyline(ex, ey, "steelblue");
  c.polyline(tx, ty, "firebrick", true);
  return c.render("CDF overlay: " + d.name, "x", "F(x)");
}

}  // namespace genou
