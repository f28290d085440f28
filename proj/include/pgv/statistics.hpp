#ifndef PGV_STATISTICS_HPP
#define PGV_STATISTICS_HPP

#include <span>
#include <vector>

namespace pgv {

struct MeanEstimate {
  double mean = 0.0;
  /// Standard error of the mean (sample sd / sqrt(n)); 0 for n < 2.
  double se = 0.0;
  std::size_t n = 0;
};

/// Summation in index order, so results do not depend on how the samples
/// were produced.
MeanEstimate mean_estimate(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x. Throws InvalidArgument
/// with fewer than two distinct abscissae.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares rate of y ~ C exp(rate t) over samples with t in
/// [t_from, t_to] and y > 0.
LinearFit fit_exponential(std::span<const double> t, std::span<const double> y, double t_from,
                          double t_to);

/// W1 distance between two equal-size empirical measures on the line.
double wasserstein_1d(std::vector<double> a, std::vector<double> b);

}  // namespace pgv

#endif  // PGV_STATISTICS_HPP
