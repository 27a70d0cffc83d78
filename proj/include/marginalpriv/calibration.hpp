#ifndef MARGINALPRIV_CALIBRATION_HPP
#define MARGINALPRIV_CALIBRATION_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "marginalpriv/database.hpp"
#include "marginalpriv/fingerprinting.hpp"
#include "marginalpriv/metrics.hpp"
#include "marginalpriv/rng.hpp"
#include "marginalpriv/sparse_vector.hpp"

// Monte Carlo experiments behind the project's two calibrated constants:
// the sparse-vector sample-size constant and the fingerprinting (length
// constant, threshold multiplier) pair. tools/calibrate runs searches over
// these; the acceptance suite re-verifies the frozen values.
namespace marginalpriv::calibration {

inline double sv_required_n_for_constant(const sv::Config& cfg, double constant) {
  return constant *
         std::sqrt(static_cast<double>(cfg.c) * std::log(1.0 / cfg.delta)) *
         std::log(static_cast<double>(cfg.k) / cfg.beta) /
         (cfg.alpha * cfg.epsilon);
}

// c planted positions spread evenly over the k query slots.
inline std::vector<std::int64_t> evenly_planted(std::int64_t k, std::int64_t c) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(c));
  for (std::int64_t i = 0; i < c; ++i) out.push_back((2 * i + 1) * k / (2 * c));
  return out;
}

// Adversarial stream for the sparse-vector contract: a two-column database
// whose first column is all +1 (query value exactly 1) and whose second is
// exactly balanced (query value exactly 0); cfg.c planted large queries among
// cfg.k. Returns the rate of trials where some answer misses its query value
// by more than cfg.alpha.
inline double sv_planted_failure_rate(const sv::Config& cfg, Index n,
                                      std::int64_t trials, std::uint64_t seed) {
  const Index rows = n % 2 == 0 ? n : n + 1;  // balanced column needs even n
  Eigen::MatrixXd signs(rows, 2);
  for (Index i = 0; i < rows; ++i) {
    signs(i, 0) = 1.0;
    signs(i, 1) = i < rows / 2 ? 1.0 : -1.0;
  }
  const Database db = Database::from_signs(signs);
  const auto planted = evenly_planted(cfg.k, cfg.c);
  const sv::LinearQuery large = sv::LinearQuery::coordinate(0);
  const sv::LinearQuery small = sv::LinearQuery::coordinate(1);

  std::int64_t failures = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    sv::Engine engine(cfg, db, Rng(derive_seed(seed, "sv/planted", t)));
    std::size_t next_planted = 0;
    bool failed = false;
    for (std::int64_t j = 0; j < cfg.k; ++j) {
      const bool is_large =
          next_planted < planted.size() && planted[next_planted] == j;
      if (is_large) ++next_planted;
      const double truth = is_large ? 1.0 : 0.0;
      const double a = engine.answer(is_large ? large : small);
      if (std::abs(a - truth) > cfg.alpha) failed = true;
    }
    if (failed) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

struct FpcRates {
  double completeness = 0.0;  // honest answers traced
  double soundness = 0.0;     // excluded user 0 accused
  double robustness = 0.0;    // answers at L1 distance d/8 still traced
};

// One code per trial; the three rates are measured on the same draw.
inline FpcRates fpc_rates(std::int64_t users, double delta,
                          double length_constant, double threshold_multiplier,
                          std::int64_t trials, std::uint64_t seed) {
  const double n = static_cast<double>(users);
  const std::int64_t d = static_cast<std::int64_t>(
      std::ceil(length_constant * n * n * std::ceil(std::log(1.0 / delta))));
  std::int64_t complete = 0, sound_violations = 0, robust = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "fpc/rates", t));
    const fpc::Code code =
        fpc::Code::generate_calibration(users, delta, d, threshold_multiplier, rng);
    const MarginalVector honest = code.codebook().marginals();
    if (!code.trace(honest).accused.empty()) ++complete;

    const Database replaced =
        code.codebook().with_row_replaced(0, Eigen::VectorXd::Ones(d));
    for (const auto i : code.trace(replaced.marginals()).accused)
      if (i == 0) ++sound_violations;

    MarginalVector perturbed = honest;
    for (Index j = 0; j < perturbed.size(); ++j)
      perturbed[j] -= (honest[j] >= 0.0 ? 1.0 : -1.0) / 8.0;
    if (!code.trace(perturbed).accused.empty()) ++robust;
  }
  const double denom = static_cast<double>(trials);
  return FpcRates{static_cast<double>(complete) / denom,
                  static_cast<double>(sound_violations) / denom,
                  static_cast<double>(robust) / denom};
}

}  // namespace marginalpriv::calibration

#endif  // MARGINALPRIV_CALIBRATION_HPP
