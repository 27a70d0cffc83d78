#ifndef MARGINALPRIV_SPARSE_VECTOR_HPP
#define MARGINALPRIV_SPARSE_VECTOR_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "marginalpriv/database.hpp"
#include "marginalpriv/rng.hpp"

namespace marginalpriv::sv {

// Thrown when more than k queries are submitted to one engine.
class SequenceError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Config {
  std::int64_t c = 1;     // above-threshold budget
  std::int64_t k = 1;     // total query budget
  double epsilon = 0.0;   // total privacy budget of the transcript
  double delta = 0.0;
  double alpha = 0.0;     // accuracy target
  double beta = 0.0;      // failure probability

  void validate() const {
    if (c < 1 || k < c) throw std::invalid_argument("need 1 <= c <= k");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("delta must be in (0, 1)");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (!(beta > 0.0 && beta < 1.0))
      throw std::invalid_argument("beta must be in (0, 1)");
  }
};

// Monte-Carlo-calibrated constant in the sample-size requirement
//   n >= K * sqrt(c ln(1/delta)) * ln(k/beta) / (alpha * epsilon).
// Calibrated once with tools/calibrate (sv mode); see README.
inline constexpr double kSampleComplexityConstant = 100.0;

inline double required_n(const Config& cfg) {
  return kSampleComplexityConstant *
         std::sqrt(static_cast<double>(cfg.c) * std::log(1.0 / cfg.delta)) *
         std::log(static_cast<double>(cfg.k) / cfg.beta) /
         (cfg.alpha * cfg.epsilon);
}

// A linear query: a bounded [-1, 1] function of a row, evaluated on a
// database as the average over rows. The engine treats queries opaquely
// through this interface; a query may carry an equivalent closed-form
// database evaluation (it must equal the row average exactly).
class LinearQuery {
 public:
  using RowFn = std::function<double(const Database&, Index)>;
  using DbFn = std::function<double(const Database&)>;

  explicit LinearQuery(RowFn row_fn) : row_fn_(std::move(row_fn)) {}
  LinearQuery(RowFn row_fn, DbFn db_fn)
      : row_fn_(std::move(row_fn)), db_fn_(std::move(db_fn)) {}

  double at_row(const Database& db, Index i) const { return row_fn_(db, i); }

  double value(const Database& db) const {
    if (db_fn_) return db_fn_(db);
    double sum = 0.0;
    for (Index i = 0; i < db.rows(); ++i) sum += row_fn_(db, i);
    return sum / static_cast<double>(db.rows());
  }

  // q(x) = x_j; on a database this is the j-th marginal.
  static LinearQuery coordinate(Index j) {
    return LinearQuery(
        [j](const Database& db, Index i) { return db.entry(i, j); },
        [j](const Database& db) { return db.marginals()[j]; });
  }

 private:
  RowFn row_fn_;
  DbFn db_fn_;
};

struct TranscriptEntry {
  std::int64_t query_index = 0;
  bool flagged = false;
  double answer = 0.0;
};

// Adaptive sparse-vector engine: an above-threshold test on |q(D)| against
// the noisy threshold T = 3 alpha / 4, restarted with a fresh threshold
// after each of up to c flags. Below-threshold queries answer 0; flagged
// queries answer q(D) plus Laplace noise, clamped to [-1, 1]; once the c
// flags are spent every further query answers 0 without touching the data.
//
// Budget: the test side and the answer side each get (eps/2, delta/2), and
// each side splits its budget across the c rounds with the
// sqrt(8 c ln(2/delta)) advanced-composition calibration.
class Engine {
 public:
  Engine(const Config& cfg, const Database& db, Rng rng);

  // Answers the next query; throws SequenceError after k queries.
  double answer(const LinearQuery& q);

  const Config& config() const { return cfg_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  std::int64_t flags_used() const { return flags_; }
  std::int64_t queries_answered() const {
    return static_cast<std::int64_t>(transcript_.size());
  }

  // True when the database is smaller than required_n(cfg); the engine
  // still runs, but the accuracy contract is not promised.
  bool budget_warning() const { return budget_warning_; }

  double noisy_threshold() const { return threshold_ + threshold_noise_; }
  double per_round_epsilon() const { return eps_round_; }

 private:
  Config cfg_;
  const Database* db_;
  Rng rng_;
  double sensitivity_;      // 2/n
  double threshold_;        // 3 alpha / 4
  double eps_round_;        // per-round budget on each side
  double threshold_noise_;  // current Laplace threshold perturbation
  std::int64_t flags_ = 0;
  bool budget_warning_ = false;
  std::vector<TranscriptEntry> transcript_;
};

}  // namespace marginalpriv::sv

#endif  // MARGINALPRIV_SPARSE_VECTOR_HPP
