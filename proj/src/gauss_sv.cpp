#include "marginalpriv/gauss_sv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "marginalpriv/metrics.hpp"

namespace marginalpriv {

GaussSvResolved resolve_gauss_sv(const GaussSvConfig& cfg, Index n, Index d) {
  if (d < 3) throw std::invalid_argument("gauss_sv needs d >= 3");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("delta must be in (0, 1)");

  GaussSvResolved r;
  const double dd = static_cast<double>(d);
  const double log_d = std::log(dd);
  r.sigma = cfg.sigma_override
                ? *cfg.sigma_override
                : 5.0 * std::sqrt(dd * std::log(1.0 / cfg.delta)) /
                      (cfg.epsilon * static_cast<double>(n));
  r.alpha = cfg.alpha_override ? *cfg.alpha_override
                               : 8.0 * r.sigma * std::sqrt(std::log(log_d));
  r.stage1_epsilon = cfg.epsilon / 2.0;
  r.stage1_delta = cfg.delta / 2.0;

  const double c_raw = 2.0 * dd / std::pow(log_d, 8.0);
  r.sv.c = cfg.c_override
               ? *cfg.c_override
               : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c_raw)));
  r.sv.k = cfg.k_override ? *cfg.k_override : d;
  if (r.sv.k < d)
    throw std::invalid_argument("sparse-vector query budget must cover all d queries");
  r.sv.epsilon = cfg.epsilon_sv_override ? *cfg.epsilon_sv_override : cfg.epsilon / 2.0;
  r.sv.delta = cfg.delta_sv_override ? *cfg.delta_sv_override : cfg.delta / 2.0;
  r.sv.alpha = cfg.alpha_sv_override ? *cfg.alpha_sv_override : r.alpha / 2.0;
  const double beta_floor = std::ldexp(1.0, -63);
  r.sv.beta = cfg.beta_sv_override
                  ? *cfg.beta_sv_override
                  : std::max(std::exp(-std::pow(log_d, 4.0)), beta_floor);
  r.sv.validate();
  return r;
}

GaussSvTrace gauss_sv_release_traced(const Database& db, const GaussSvConfig& cfg,
                                     Rng& rng) {
  const Index d = db.dims();
  GaussSvTrace t;
  t.resolved = resolve_gauss_sv(cfg, db.rows(), d);

  const MarginalVector& truth = db.marginals();
  t.noise.resize(d);
  for (Index j = 0; j < d; ++j) t.noise[j] = rng.normal(t.resolved.sigma);
  // Clamping the anchor keeps each query inside [-1, 1] and can only move
  // it toward the true marginal.
  t.stage1 = clamp_unit(truth + t.noise);

  sv::Engine engine(t.resolved.sv, db, Rng(rng.next_u64()));
  t.query_values.resize(d);
  t.sv_answers.resize(d);
  Eigen::VectorXd raw(d);
  for (Index j = 0; j < d; ++j) {
    const double anchor = t.stage1[j];
    sv::LinearQuery q(
        [j, anchor](const Database& database, Index i) {
          return (database.entry(i, j) - anchor) / 2.0;
        },
        [j, anchor](const Database& database) {
          return (database.marginals()[j] - anchor) / 2.0;
        });
    t.query_values[j] = (truth[j] - anchor) / 2.0;
    t.sv_answers[j] = engine.answer(q);
    raw[j] = anchor + 2.0 * t.sv_answers[j];
  }
  t.output = clamp_unit(raw);
  t.flags_used = engine.flags_used();
  t.budget_warning = engine.budget_warning();
  return t;
}

MarginalVector gauss_sv_release(const Database& db, const GaussSvConfig& cfg,
                                Rng& rng) {
  return gauss_sv_release_traced(db, cfg, rng).output;
}

std::int64_t bad_coordinate_census(const Eigen::VectorXd& z, double threshold) {
  return (z.cwiseAbs().array() > threshold).count();
}

}  // namespace marginalpriv
