#ifndef MARGINALPRIV_PARAMS_HPP
#define MARGINALPRIV_PARAMS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace marginalpriv {

// (epsilon, delta) privacy budget; delta = 0 is pure differential privacy.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    if (!(delta >= 0.0 && delta < 1.0))
      throw std::invalid_argument("delta must be in [0, 1)");
  }

  bool pure() const { return delta == 0.0; }
};

struct AccuracyParams {
  double alpha = 0.0;  // error target, in (0, 1]
  double beta = 0.0;   // failure probability, in (0, 1)

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("alpha must be in (0, 1]");
    if (!(beta > 0.0 && beta < 1.0))
      throw std::invalid_argument("beta must be in (0, 1)");
  }
};

// Degraded budget when up to k rows change at once.
struct GroupPrivacyParams {
  std::int64_t k = 1;
  double epsilon_k = 0.0;
  double delta_k = 0.0;
};

// (epsilon, delta) -> (k*epsilon, ((e^{k eps} - 1)/(e^eps - 1)) * delta).
// At epsilon = 0 the multiplier is its continuity limit k. k = 1 returns the
// input bit-exactly.
inline GroupPrivacyParams group_privacy(const PrivacyParams& p, std::int64_t k) {
  p.validate();
  if (k < 1) throw std::invalid_argument("group size k must be >= 1");
  GroupPrivacyParams out;
  out.k = k;
  out.epsilon_k = static_cast<double>(k) * p.epsilon;
  if (p.delta == 0.0) {
    out.delta_k = 0.0;
  } else if (p.epsilon == 0.0) {
    out.delta_k = static_cast<double>(k) * p.delta;
  } else {
    // expm1 keeps the ratio accurate for small epsilon.
    out.delta_k =
        std::expm1(static_cast<double>(k) * p.epsilon) / std::expm1(p.epsilon) * p.delta;
  }
  return out;
}

}  // namespace marginalpriv

#endif  // MARGINALPRIV_PARAMS_HPP
