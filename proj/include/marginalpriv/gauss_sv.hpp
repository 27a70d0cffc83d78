#ifndef MARGINALPRIV_GAUSS_SV_HPP
#define MARGINALPRIV_GAUSS_SV_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "marginalpriv/database.hpp"
#include "marginalpriv/rng.hpp"
#include "marginalpriv/sparse_vector.hpp"

namespace marginalpriv {

// Worst-case-error release under approximate DP: Gaussian noise on every
// marginal, then a sparse-vector pass that repairs the few coordinates the
// Gaussian stage got badly wrong. Each stage consumes (eps/2, delta/2).
//
// Every derived constant has an override hook; the defaults are
//   sigma = 5 sqrt(d ln(1/delta)) / (eps n)
//   alpha = 8 sigma sqrt(ln ln d)
//   c     = max(1, ceil(2 d / ln^8 d))   (the raw value is < 1 for any
//                                         desk-scale d, hence the clamp)
//   k     = d
//   beta  = max(e^{-ln^4 d}, 2^-63)      (floored to keep scales finite)
struct GaussSvConfig {
  double epsilon = 0.0;
  double delta = 0.0;

  std::optional<double> sigma_override;
  std::optional<double> alpha_override;
  std::optional<std::int64_t> c_override;
  std::optional<std::int64_t> k_override;
  std::optional<double> epsilon_sv_override;
  std::optional<double> delta_sv_override;
  std::optional<double> alpha_sv_override;
  std::optional<double> beta_sv_override;
};

struct GaussSvResolved {
  double sigma = 0.0;
  double alpha = 0.0;
  double stage1_epsilon = 0.0;
  double stage1_delta = 0.0;
  sv::Config sv;

  double total_epsilon() const { return stage1_epsilon + sv.epsilon; }
  double total_delta() const { return stage1_delta + sv.delta; }
};

// Resolves the derived constants for an n x d input. d >= 3 is required for
// the ln ln d factor.
GaussSvResolved resolve_gauss_sv(const GaussSvConfig& cfg, Index n, Index d);

// Full per-run record, for tests and experiment reports.
struct GaussSvTrace {
  GaussSvResolved resolved;
  Eigen::VectorXd noise;          // stage-1 Gaussian draws z
  MarginalVector stage1;          // clamp(marginals + z); the query anchor
  Eigen::VectorXd query_values;   // q_j(D) = (marginals_j - stage1_j)/2
  Eigen::VectorXd sv_answers;     // sparse-vector answers
  MarginalVector output;          // clamp(stage1 + 2 * sv_answers)
  std::int64_t flags_used = 0;
  bool budget_warning = false;
};

GaussSvTrace gauss_sv_release_traced(const Database& db, const GaussSvConfig& cfg,
                                     Rng& rng);

MarginalVector gauss_sv_release(const Database& db, const GaussSvConfig& cfg,
                                Rng& rng);

// |{j : |z_j| > threshold}|.
std::int64_t bad_coordinate_census(const Eigen::VectorXd& z, double threshold);

}  // namespace marginalpriv

#endif  // MARGINALPRIV_GAUSS_SV_HPP
