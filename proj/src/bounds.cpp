#include "marginalpriv/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace marginalpriv {

SampleComplexityBounds sample_complexity_bounds(std::int64_t d, double alpha,
                                                double epsilon,
                                                std::optional<double> delta,
                                                double constant) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (delta) {
    if (*delta == 0.0)
      throw std::domain_error("delta-dependent bounds need delta > 0");
    if (!(*delta > 0.0 && *delta < 1.0))
      throw std::invalid_argument("delta must be in (0, 1)");
  }

  SampleComplexityBounds out;
  const double dd = static_cast<double>(d);
  out.pure_upper = constant * dd / (epsilon * alpha);
  out.pure_lower = constant * dd / epsilon;
  if (delta) {
    const double log_inv_delta = std::log(1.0 / *delta);
    const double approx = std::sqrt(dd * log_inv_delta) / (epsilon * alpha);
    out.approx_upper = constant * approx;
    out.approx_lower = constant * approx;
    if (d >= 3) {
      out.worstcase_upper = constant *
                            std::sqrt(dd * log_inv_delta * std::log(std::log(dd))) /
                            (epsilon * alpha);
    }
  }
  return out;
}

}  // namespace marginalpriv
