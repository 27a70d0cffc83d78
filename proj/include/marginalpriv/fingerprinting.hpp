#ifndef MARGINALPRIV_FINGERPRINTING_HPP
#define MARGINALPRIV_FINGERPRINTING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "marginalpriv/database.hpp"
#include "marginalpriv/rng.hpp"

namespace marginalpriv::fpc {

// Length constant and score-threshold multiplier, fixed by the Monte Carlo
// calibration protocol at (n = 10, delta = 0.05): over 10^4 trials, honest
// answers trace with rate >= 0.99, an excluded user is accused with rate
// <= delta, and answers perturbed by L1 mass d/8 still trace >= 0.99.
// Calibrated with tools/calibrate (fpc mode); see README.
inline constexpr double kLengthConstant = 5.0;
inline constexpr double kThresholdMultiplier = 0.95;

// Minimum code length: ceil(C * n^2 * ceil(ln(1/delta))).
std::int64_t min_length(std::int64_t users, double delta);

// Accusation threshold: multiplier * sqrt(d * ln(1/delta)).
double trace_threshold(std::int64_t length, double delta,
                       double multiplier = kThresholdMultiplier);

struct TraceResult {
  std::vector<std::int64_t> accused;  // {i : scores[i] > threshold}
  Eigen::VectorXd scores;
};

// A bias-based code: per-column +1 probabilities p_j drawn from the density
// proportional to 1/sqrt(p(1-p)) restricted to [t, 1-t] with t = 1/(300n),
// a codebook of n rows drawn independently given the biases, and a tracer
// scoring answers by their correlation with each user's centered,
// normalized row.
class Code {
 public:
  static Code generate(std::int64_t users, double delta, std::int64_t length,
                       Rng& rng);

  // Calibration-protocol variant: skips the minimum-length gate and takes an
  // explicit threshold multiplier, so searches can probe candidate
  // constants. Production callers use generate().
  static Code generate_calibration(std::int64_t users, double delta,
                                   std::int64_t length,
                                   double threshold_multiplier, Rng& rng);

  const Database& codebook() const { return codebook_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  double soundness_delta() const { return delta_; }
  double bias_cutoff() const { return cutoff_; }
  double threshold() const { return threshold_; }

  // Scores: S_i = sum_j answers_j * (x_ij - p_j)/sqrt(p_j (1-p_j)) with
  // x_ij = (D_ij + 1)/2, accumulated with compensated summation. Accuses
  // every user whose score exceeds the threshold. Deterministic in
  // (code, answers).
  TraceResult trace(const MarginalVector& answers) const;

  // The codebook travels in the Database binary format; biases, threshold
  // and parameters go to a key=value sidecar.
  void save(const std::string& codebook_path, const std::string& sidecar_path) const;
  static Code load(const std::string& codebook_path, const std::string& sidecar_path);

  void write_sidecar(std::ostream& out) const;

 private:
  Code(Database codebook, Eigen::VectorXd biases, double delta, double cutoff,
       double threshold);

  Database codebook_;
  Eigen::VectorXd biases_;
  double delta_;
  double cutoff_;
  double threshold_;
};

}  // namespace marginalpriv::fpc

#endif  // MARGINALPRIV_FINGERPRINTING_HPP
