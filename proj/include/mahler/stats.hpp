#pragma once

// Least-squares fits used to summarize sweeps.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mahler {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  // One-sided p-value for the null hypothesis slope <= 0.
  double p_value = 1;
  std::size_t samples = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (m < 2) throw std::invalid_argument("fit_line: need at least two samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_line: constant abscissa");
  LinearFit fit;
  fit.samples = m;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (m > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
    if (fit.slope_stderr > 0) {
      boost::math::students_t dist(static_cast<double>(m - 2));
      fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.slope / fit.slope_stderr));
    } else {
      fit.p_value = fit.slope > 0 ? 0.0 : 1.0;
    }
  }
  return fit;
}

// Slope of log|y| against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return fit_line(lx, ly).slope;
}

// (max - min) / max of a nonnegative series; 0 when the series is identically 0.
inline double relative_variation(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi == 0 ? 0 : (hi - lo) / hi;
}

}  // namespace mahler
