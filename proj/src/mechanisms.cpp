#include "marginalpriv/mechanisms.hpp"

#include <stdexcept>

#include "marginalpriv/mathstat.hpp"

namespace marginalpriv {

double laplace_marginal_scale(Index n, Index d, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  return 2.0 * static_cast<double>(d) / (static_cast<double>(n) * epsilon);
}

NoiseScale laplace_scale_for(const Database& db, double epsilon) {
  NoiseScale s;
  s.delta_sensitivity = marginal_sensitivity(db);
  s.b = laplace_marginal_scale(db.rows(), db.dims(), epsilon);
  return s;
}

double gaussian_sigma(Index n, Index d, double epsilon, double delta,
                      GaussianCalibration calibration) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("gaussian release needs delta in (0, 1)");
  const double dn = static_cast<double>(n), dd = static_cast<double>(d);
  switch (calibration) {
    case GaussianCalibration::kFixedConstant:
      return 5.0 * std::sqrt(dd * std::log(1.0 / delta)) / (epsilon * dn);
    case GaussianCalibration::kAnalytic:
      return 2.0 * std::sqrt(2.0 * std::log(1.25 / delta)) * std::sqrt(dd) /
             (dn * epsilon);
  }
  throw std::invalid_argument("unknown gaussian calibration");
}

NoiseScale gaussian_scale_for(const Database& db, double epsilon, double delta,
                              GaussianCalibration calibration) {
  NoiseScale s;
  s.delta_sensitivity = marginal_sensitivity(db);
  s.sigma = gaussian_sigma(db.rows(), db.dims(), epsilon, delta, calibration);
  return s;
}

MarginalVector laplace_release(const Database& db, double epsilon, Rng& rng) {
  const double b = laplace_marginal_scale(db.rows(), db.dims(), epsilon);
  MarginalVector out = db.marginals();
  for (Index j = 0; j < out.size(); ++j) out[j] += rng.laplace(b);
  return clamp_unit(out);
}

MarginalVector gaussian_release(const Database& db, double epsilon, double delta,
                                Rng& rng, GaussianCalibration calibration) {
  const double sigma =
      gaussian_sigma(db.rows(), db.dims(), epsilon, delta, calibration);
  MarginalVector out = db.marginals();
  for (Index j = 0; j < out.size(); ++j) out[j] += rng.normal(sigma);
  return clamp_unit(out);
}

LinfNoiseSample linf_sample(Index d, double epsilon, double delta_sensitivity,
                            Rng& rng) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(epsilon > 0.0) || !(delta_sensitivity > 0.0))
    throw std::invalid_argument("epsilon and Delta must be > 0");
  // d+1 exponentials: Gamma(d+1) radius. Consumes d+1 logs and 2d+1
  // uniforms in total, including the d box offsets below.
  double shape_sum = 0.0;
  for (Index i = 0; i <= d; ++i) shape_sum += rng.exponential();
  LinfNoiseSample s;
  s.radius = delta_sensitivity / epsilon * shape_sum;
  s.offsets.resize(d);
  for (Index j = 0; j < d; ++j) s.offsets[j] = s.radius * rng.uniform_symmetric();
  return s;
}

MarginalVector linf_release(const Database& db, double epsilon, Rng& rng) {
  const LinfNoiseSample s =
      linf_sample(db.dims(), epsilon, marginal_sensitivity(db), rng);
  return clamp_unit(db.marginals() + s.offsets);
}

double linf_tail_exact(Index d, double epsilon, double delta_sensitivity,
                       double alpha) {
  return gamma_tail_integer_shape(d, delta_sensitivity / epsilon, alpha);
}

double linf_tail_chernoff(Index d, double epsilon, double delta_sensitivity,
                          double alpha) {
  const double dd = static_cast<double>(d);
  const double ratio = epsilon * alpha / (delta_sensitivity * dd);
  if (!(ratio > 1.0)) return 1.0;  // Chernoff point only valid above the mean
  return std::exp(dd * std::log(ratio) + dd - alpha * epsilon / delta_sensitivity);
}

}  // namespace marginalpriv
