#ifndef MARGINALPRIV_MECHANISMS_HPP
#define MARGINALPRIV_MECHANISMS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "marginalpriv/database.hpp"
#include "marginalpriv/metrics.hpp"
#include "marginalpriv/rng.hpp"

namespace marginalpriv {

// Resolved noise scales for a release. delta_sensitivity is the
// per-coordinate sensitivity of the marginal vector, 2/n.
struct NoiseScale {
  double delta_sensitivity = 0.0;
  double sigma = 0.0;  // Gaussian standard deviation
  double b = 0.0;      // Laplace scale
};

enum class GaussianCalibration {
  // sigma = 5 sqrt(d ln(1/delta)) / (eps n), the fixed-constant calibration.
  kFixedConstant,
  // sigma = 2 sqrt(2 ln(1.25/delta)) sqrt(d) / (n eps), from the standard
  // L2-sensitivity analysis.
  kAnalytic,
};

inline double marginal_sensitivity(const Database& db) {
  return 2.0 / static_cast<double>(db.rows());
}

// Per-coordinate Laplace scale for an (eps, 0)-DP release of the whole
// d-vector: b = (L1 sensitivity)/eps = (2d/n)/eps.
double laplace_marginal_scale(Index n, Index d, double epsilon);
NoiseScale laplace_scale_for(const Database& db, double epsilon);

double gaussian_sigma(Index n, Index d, double epsilon, double delta,
                      GaussianCalibration calibration);
NoiseScale gaussian_scale_for(const Database& db, double epsilon, double delta,
                              GaussianCalibration calibration);

// clamp(marginals + iid Laplace(b)); (eps, 0)-DP.
MarginalVector laplace_release(const Database& db, double epsilon, Rng& rng);

// clamp(marginals + iid Normal(0, sigma^2)); (eps, delta)-DP. delta = 0 is a
// parameter error.
MarginalVector gaussian_release(
    const Database& db, double epsilon, double delta, Rng& rng,
    GaussianCalibration calibration = GaussianCalibration::kFixedConstant);

// One draw from the density proportional to exp(-(eps/Delta) * ||y||_inf):
// radius R = (Delta/eps) * sum of d+1 standard exponentials (i.e.
// Gamma(d+1, Delta/eps)), then offsets uniform in [-R, R]^d. The induced
// ||Y||_inf is Gamma(d, Delta/eps) with mean d*Delta/eps.
struct LinfNoiseSample {
  double radius = 0.0;
  Eigen::VectorXd offsets;
};

LinfNoiseSample linf_sample(Index d, double epsilon, double delta_sensitivity,
                            Rng& rng);

// clamp(marginals + Y) with Y from linf_sample at Delta = 2/n; (eps, 0)-DP.
MarginalVector linf_release(const Database& db, double epsilon, Rng& rng);

// Exact density ratio pdf(y) / pdf(y_shifted) for the exp(-(eps/Delta)
// ||.||_inf) density: exp((eps/Delta) (||y_shifted||_inf - ||y||_inf)).
// Bounded by e^eps whenever ||y_shifted - y||_inf <= Delta; this is the
// analytically checkable privacy witness.
template <typename DerivedA, typename DerivedB>
double linf_density_ratio(const Eigen::MatrixBase<DerivedA>& y,
                          const Eigen::MatrixBase<DerivedB>& y_shifted,
                          double epsilon, double delta_sensitivity) {
  if (!(epsilon > 0.0) || !(delta_sensitivity > 0.0))
    throw std::invalid_argument("epsilon and Delta must be > 0");
  const double ny = y.derived().template lpNorm<Eigen::Infinity>();
  const double ns = y_shifted.derived().template lpNorm<Eigen::Infinity>();
  return std::exp(epsilon / delta_sensitivity * (ns - ny));
}

// Exact tail P[||Y||_inf >= alpha] of the Gamma(d, Delta/eps) law.
double linf_tail_exact(Index d, double epsilon, double delta_sensitivity,
                       double alpha);

// Chernoff bound on the same tail: (eps alpha / (Delta d))^d e^{d - alpha
// eps/Delta}, valid for alpha > d Delta / eps (above the mean).
double linf_tail_chernoff(Index d, double epsilon, double delta_sensitivity,
                          double alpha);

}  // namespace marginalpriv

#endif  // MARGINALPRIV_MECHANISMS_HPP
