#include "pgv/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "pgv/errors.hpp"

namespace pgv {

MeanEstimate mean_estimate(std::span<const double> x) {
  MeanEstimate e;
  e.n = x.size();
  if (x.empty()) return e;
  double s = 0.0;
  for (double v : x) s += v;
  e.mean = s / static_cast<double>(x.size());
  if (x.size() < 2) return e;
  double ss = 0.0;
  for (double v : x) ss += (v - e.mean) * (v - e.mean);
  const double var = ss / static_cast<double>(x.size() - 1);
  e.se = std::sqrt(var / static_cast<double>(x.size()));
  return e;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: size mismatch");
  const std::size_t n = x.size();
  LinearFit f;
  f.n = n;
  if (n < 2) throw InvalidArgument("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_line: abscissae are all equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

LinearFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_from,
                          double t_to) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from || t[i] > t_to || !(y[i] > 0.0)) continue;
    xs.push_back(t[i]);
    ys.push_back(std::log(y[i]));
  }
  return fit_line(xs, ys);
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty())
    throw InvalidArgument("wasserstein_1d: need two non-empty samples of equal size");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace pgv
