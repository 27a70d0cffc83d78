#include "marginalpriv/fingerprinting.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "marginalpriv/mathstat.hpp"

namespace marginalpriv::fpc {

std::int64_t min_length(std::int64_t users, double delta) {
  if (users < 2) throw std::invalid_argument("code needs at least 2 users");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must be in (0, 1)");
  const double log_ceil = std::ceil(std::log(1.0 / delta));
  const double n = static_cast<double>(users);
  return static_cast<std::int64_t>(std::ceil(kLengthConstant * n * n * log_ceil));
}

double trace_threshold(std::int64_t length, double delta, double multiplier) {
  return multiplier * std::sqrt(static_cast<double>(length) * std::log(1.0 / delta));
}

Code::Code(Database codebook, Eigen::VectorXd biases, double delta, double cutoff,
           double threshold)
    : codebook_(std::move(codebook)),
      biases_(std::move(biases)),
      delta_(delta),
      cutoff_(cutoff),
      threshold_(threshold) {}

Code Code::generate(std::int64_t users, double delta, std::int64_t length,
                    Rng& rng) {
  if (length < min_length(users, delta))
    throw std::invalid_argument("code length below minimum for (users, delta)");
  return generate_calibration(users, delta, length, kThresholdMultiplier, rng);
}

Code Code::generate_calibration(std::int64_t users, double delta,
                                std::int64_t length, double threshold_multiplier,
                                Rng& rng) {
  if (users < 2) throw std::invalid_argument("code needs at least 2 users");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must be in (0, 1)");
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  const double t = 1.0 / (300.0 * static_cast<double>(users));
  const double r_lo = std::asin(std::sqrt(t));
  const double r_hi = std::asin(std::sqrt(1.0 - t));
  Eigen::VectorXd biases(length);
  for (std::int64_t j = 0; j < length; ++j) {
    const double r = r_lo + rng.uniform() * (r_hi - r_lo);
    const double s = std::sin(r);
    biases[j] = s * s;
  }
  Database codebook = Database::column_biased(users, biases, rng);
  return Code(std::move(codebook), std::move(biases), delta, t,
              trace_threshold(length, delta, threshold_multiplier));
}

TraceResult Code::trace(const MarginalVector& answers) const {
  const Index n = codebook_.rows();
  const Index d = codebook_.dims();
  if (answers.size() != d)
    throw std::invalid_argument("answer vector length does not match code length");

  // S_i = sum_{j set in row i} w_j - sum_j answers_j p_j / sqrt(p_j q_j)
  // with w_j = answers_j / sqrt(p_j q_j); the second term is user
  // independent.
  Eigen::VectorXd w(d);
  KahanSum base;
  for (Index j = 0; j < d; ++j) {
    const double p = biases_[j];
    const double norm = std::sqrt(p * (1.0 - p));
    w[j] = answers[j] / norm;
    base.add(w[j] * p);
  }
  const double common = base.value();

  TraceResult result;
  result.scores.resize(n);
  const std::size_t stride = codebook_.row_stride_words();
  const std::uint64_t* words = codebook_.words().data();
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t* row = words + static_cast<std::size_t>(i) * stride;
    KahanSum s;
    for (std::size_t word = 0; word < stride; ++word) {
      std::uint64_t bits = row[word];
      const Index basej = static_cast<Index>(word * 64);
      while (bits) {
        const int b = __builtin_ctzll(bits);
        s.add(w[basej + b]);
        bits &= bits - 1;
      }
    }
    result.scores[i] = s.value() - common;
    if (result.scores[i] > threshold_) result.accused.push_back(i);
  }
  return result;
}

void Code::write_sidecar(std::ostream& out) const {
  char buf[64];
  out << "format=marginalpriv-fpc\n";
  out << "version=1\n";
  out << "users=" << codebook_.rows() << "\n";
  out << "length=" << codebook_.dims() << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", delta_);
  out << "delta=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", cutoff_);
  out << "cutoff=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", threshold_);
  out << "threshold=" << buf << "\n";
  for (Index j = 0; j < biases_.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", biases_[j]);
    out << "bias[" << j << "]=" << buf << "\n";
  }
}

void Code::save(const std::string& codebook_path,
                const std::string& sidecar_path) const {
  codebook_.save_binary(codebook_path);
  std::ofstream out(sidecar_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + sidecar_path + " for writing");
  write_sidecar(out);
  if (!out) throw IoError("failed writing " + sidecar_path);
}

Code Code::load(const std::string& codebook_path, const std::string& sidecar_path) {
  Database codebook = Database::load(codebook_path);
  std::ifstream in(sidecar_path);
  if (!in) throw IoError("cannot open " + sidecar_path);
  std::map<std::string, std::string, std::less<>> scalars;
  Eigen::VectorXd biases(codebook.dims());
  Eigen::VectorXd seen = Eigen::VectorXd::Zero(codebook.dims());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("sidecar line without '='");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("bias[", 0) == 0) {
      const auto close = key.find(']');
      if (close == std::string::npos) throw IoError("malformed bias key");
      const std::int64_t j = std::stoll(key.substr(5, close - 5));
      if (j < 0 || j >= codebook.dims()) throw IoError("bias index out of range");
      biases[j] = std::stod(value);
      seen[j] = 1.0;
    } else {
      scalars[key] = value;
    }
  }
  if (scalars["format"] != "marginalpriv-fpc") throw IoError("not an fpc sidecar");
  if (std::stoll(scalars["users"]) != codebook.rows() ||
      std::stoll(scalars["length"]) != codebook.dims())
    throw IoError("sidecar dimensions do not match codebook");
  if (seen.sum() != static_cast<double>(codebook.dims()))
    throw IoError("sidecar is missing bias entries");
  return Code(std::move(codebook), std::move(biases), std::stod(scalars["delta"]),
              std::stod(scalars["cutoff"]), std::stod(scalars["threshold"]));
}

}  // namespace marginalpriv::fpc
