#ifndef MARGINALPRIV_BOUNDS_HPP
#define MARGINALPRIV_BOUNDS_HPP

#include <cstdint>
#include <optional>

namespace marginalpriv {

// Explicit constants that go with the closed-form bounds below. The formulas
// are returned with unit constant; callers that want a concrete multiplier
// pass one of these (or their own) through the `constant` argument.
inline constexpr double kRepairSampleConstant = 40.0;  // worst-case approx-DP upper bound
inline constexpr double kGaussianSigmaConstant = 5.0;  // sigma calibration constant
inline constexpr double kRepairAlphaConstant = 8.0;    // alpha calibration constant

// Closed-form sample-complexity formulas for releasing d one-way marginals
// with accuracy alpha under an (epsilon, delta) budget, all with unit
// constant ("up to constants"). Entries that need delta > 0 (or d >= 3 for
// the log log d factor) are absent when the inputs cannot support them.
struct SampleComplexityBounds {
  // Average-case upper bounds for additive-noise release: the approximate-DP
  // branch sqrt(d ln(1/delta))/(eps alpha) and the pure-DP branch
  // d/(eps alpha); the usable one is the min of the two.
  std::optional<double> approx_upper;
  double pure_upper = 0.0;

  // Approximate-DP lower bound, same formula shape as approx_upper.
  std::optional<double> approx_lower;

  // Worst-case-error approximate-DP upper bound,
  // sqrt(d ln(1/delta) ln ln d)/(eps alpha); needs d >= 3.
  std::optional<double> worstcase_upper;

  // Pure-DP packing lower bound d/eps.
  double pure_lower = 0.0;
};

// d >= 1, 0 < alpha <= 1, eps > 0; delta, when present, must lie in (0, 1).
// Passing delta = 0 explicitly is a domain error (the log(1/delta) terms
// would be infinite). All returned values are multiplied by `constant`.
SampleComplexityBounds sample_complexity_bounds(std::int64_t d, double alpha,
                                                double epsilon,
                                                std::optional<double> delta,
                                                double constant = 1.0);

}  // namespace marginalpriv

#endif  // MARGINALPRIV_BOUNDS_HPP
