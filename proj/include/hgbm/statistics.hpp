#pragma once

#include <cstddef>
#include <vector>

namespace hgbm {

// Asymptotic Kolmogorov critical constant c(a) = sqrt(-ln(a/2)/2): 1.6276 at 1%, 1.3581 at 5%.
double ks_constant(double level);

struct KsResult {
  double statistic = 0.0;
  double critical_1 = 0.0;  // reject at 1% above this
  double critical_5 = 0.0;
  std::size_t n = 0;
  bool pass_1() const { return statistic <= critical_1; }
  bool pass_5() const { return statistic <= critical_5; }
};

// Two-sided one-sample test against N(0, sigma2). Needs at least 100 samples with
// nonzero spread.
KsResult ks_normal_test(std::vector<double> samples, double sigma2);

// Two-sample test; critical values c(a) sqrt((n + m) / (n m)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(const std::vector<double>& samples);

}  // namespace hgbm
