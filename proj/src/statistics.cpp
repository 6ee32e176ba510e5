#include "hgbm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hgbm/errors.hpp"

namespace hgbm {

double ks_constant(double level) { return std::sqrt(-0.5 * std::log(0.5 * level)); }

KsResult ks_normal_test(std::vector<double> samples, double sigma2) {
  if (samples.size() < 100) throw DomainError("ks_normal_test: needs at least 100 samples");
  if (!(sigma2 > 0.0)) throw DomainError("ks_normal_test: sigma2 must be positive");
  std::sort(samples.begin(), samples.end());
  if (samples.front() == samples.back()) throw DomainError("ks_normal_test: degenerate samples");
  const double n = static_cast<double>(samples.size());
  const double scale = 1.0 / std::sqrt(2.0 * sigma2);
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] * scale);
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  KsResult r;
  r.statistic = d;
  r.n = samples.size();
  r.critical_1 = ks_constant(0.01) / std::sqrt(n);
  r.critical_5 = ks_constant(0.05) / std::sqrt(n);
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size() + b.size();
  const double factor = std::sqrt((n + m) / (n * m));
  r.critical_1 = ks_constant(0.01) * factor;
  r.critical_5 = ks_constant(0.05) * factor;
  return r;
}

MeanEstimate mean_estimate(const std::vector<double>& x) {
  MeanEstimate e;
  e.n = x.size();
  if (x.empty()) return e;
  double sum = 0.0;
  for (double v : x) sum += v;
  e.mean = sum / e.n;
  double ss = 0.0;
  for (double v : x) ss += (v - e.mean) * (v - e.mean);
  e.variance = e.n > 1 ? ss / (e.n - 1) : 0.0;
  e.std_error = std::sqrt(e.variance / e.n);
  return e;
}

}  // namespace hgbm
