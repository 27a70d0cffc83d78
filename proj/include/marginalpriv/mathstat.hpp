#ifndef MARGINALPRIV_MATHSTAT_HPP
#define MARGINALPRIV_MATHSTAT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace marginalpriv {

// 99.5% standard-normal quantile; P[|N(0,1)| > this] = 0.01.
inline constexpr double kNormalQuantile995 = 2.5758293035489004;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P[|N(0,1)| > t].
inline double normal_two_sided_tail(double t) { return std::erfc(t / std::sqrt(2.0)); }

// P[Gamma(shape, scale) <= x] for integer shape (Erlang), via the Poisson
// sum 1 - e^-r sum_{k<shape} r^k/k! with r = x/scale. Exact form, no
// continued fractions needed.
inline double gamma_cdf_integer_shape(std::int64_t shape, double scale, double x) {
  if (shape < 1) throw std::invalid_argument("shape must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be > 0");
  if (x <= 0.0) return 0.0;
  const double r = x / scale;
  double term = std::exp(-r);  // k = 0
  double tail = term;
  for (std::int64_t k = 1; k < shape; ++k) {
    term *= r / static_cast<double>(k);
    tail += term;
  }
  return 1.0 - std::min(1.0, tail);
}

inline double gamma_tail_integer_shape(std::int64_t shape, double scale, double x) {
  if (x <= 0.0) return 1.0;
  const double r = x / scale;
  double term = std::exp(-r);
  double tail = term;
  for (std::int64_t k = 1; k < shape; ++k) {
    term *= r / static_cast<double>(k);
    tail += term;
  }
  return std::min(1.0, tail);
}

// Kolmogorov-Smirnov distance between the sample set and a reference CDF.
// Sorts its argument.
inline double ks_distance(std::vector<double>& samples,
                          const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    dist = std::max(dist, std::max(f - lo, hi - f));
  }
  return dist;
}

// One Monte Carlo standard error for a rate estimated from n trials.
inline double rate_stderr(double p, std::int64_t n) {
  const double q = std::min(std::max(p, 0.0), 1.0);
  return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

// Compensated (Kahan) accumulator.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace marginalpriv

#endif  // MARGINALPRIV_MATHSTAT_HPP
