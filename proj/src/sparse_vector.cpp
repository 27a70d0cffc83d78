#include "marginalpriv/sparse_vector.hpp"

#include <algorithm>
#include <cmath>

namespace marginalpriv::sv {

Engine::Engine(const Config& cfg, const Database& db, Rng rng)
    : cfg_(cfg), db_(&db), rng_(rng) {
  cfg_.validate();
  sensitivity_ = 2.0 / static_cast<double>(db.rows());
  threshold_ = 0.75 * cfg_.alpha;
  const double half_eps = 0.5 * cfg_.epsilon;
  const double comp = std::sqrt(8.0 * static_cast<double>(cfg_.c) *
                                std::log(2.0 / cfg_.delta));
  eps_round_ = half_eps / comp;
  threshold_noise_ = rng_.laplace(2.0 * sensitivity_ / eps_round_);
  budget_warning_ = static_cast<double>(db.rows()) < required_n(cfg_);
  transcript_.reserve(static_cast<std::size_t>(cfg_.k));
}

double Engine::answer(const LinearQuery& q) {
  if (queries_answered() >= cfg_.k)
    throw SequenceError("sparse vector: query budget k exhausted");
  TranscriptEntry e;
  e.query_index = queries_answered();
  if (flags_ >= cfg_.c) {
    // All flags spent: every remaining answer is 0, data untouched.
    e.flagged = false;
    e.answer = 0.0;
    transcript_.push_back(e);
    return 0.0;
  }
  const double value = q.value(*db_);
  const double test_noise = rng_.laplace(4.0 * sensitivity_ / eps_round_);
  if (std::abs(value) + test_noise > threshold_ + threshold_noise_) {
    ++flags_;
    const double noisy =
        value + rng_.laplace(sensitivity_ / eps_round_);
    e.flagged = true;
    e.answer = std::clamp(noisy, -1.0, 1.0);
    if (flags_ < cfg_.c)
      threshold_noise_ = rng_.laplace(2.0 * sensitivity_ / eps_round_);
  } else {
    e.flagged = false;
    e.answer = 0.0;
  }
  transcript_.push_back(e);
  return e.answer;
}

}  // namespace marginalpriv::sv
