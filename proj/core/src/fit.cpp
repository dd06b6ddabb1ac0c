#include "nlsplit/fit.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "nlsplit/common.hpp"

namespace nlsplit {

FitResult fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit_slope: x and y differ in length");
  FitResult r;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    } else {
      ++r.points_excluded;
    }
  }
  const std::size_t n = lx.size();
  r.points_used = static_cast<int>(n);
  if (n < 2) throw ValidationError("fit_slope: fewer than two positive points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("fit_slope: all abscissae coincide");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  if (n > 2) {
    const double se = std::sqrt(ss / (n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    r.ci_low = r.slope - q * se;
    r.ci_high = r.slope + q * se;
  } else {
    r.ci_low = -std::numeric_limits<double>::infinity();
    r.ci_high = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace nlsplit
