#ifndef MARGINALPRIV_DATABASE_HPP
#define MARGINALPRIV_DATABASE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "marginalpriv/rng.hpp"

namespace marginalpriv {

using Index = Eigen::Index;

// A released or true answer vector: d reals, each in [-1, 1].
using MarginalVector = Eigen::VectorXd;

// Thrown on malformed or mismatched database files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An n x d matrix with entries in {-1, +1}, stored as row-major packed sign
// bits (1 = +1). Immutable after construction; per-column +1 counts and the
// marginal vector are computed exactly (integer counts) at construction, so
// sharing across threads needs no synchronization.
//
// In memory each row occupies ceil(d/64) words. The serialized binary format
// is bit-contiguous instead: an 8-byte magic header, little-endian u64 n and
// d, then ceil(n*d/8) bytes of row-major packed bits. The text format is one
// row per line using '+' and '-'.
class Database {
 public:
  // rows: n x d matrix with every entry exactly +1 or -1.
  static Database from_signs(const Eigen::MatrixXd& rows);

  // Every entry an independent fair sign.
  static Database random_uniform(Index n, Index d, Rng& rng);

  // Every entry +1 with probability p.
  static Database random_biased(Index n, Index d, double p, Rng& rng);

  // Entry (i, j) is +1 with probability biases[j]; rows i.i.d. given biases.
  static Database column_biased(Index n, const Eigen::VectorXd& biases,
                                Rng& rng);

  // n identical copies of a +-1 row.
  static Database repeat_row(const Eigen::VectorXd& row, Index n);

  Index rows() const { return n_; }
  Index dims() const { return d_; }

  // Entry as a sign: +1.0 or -1.0.
  double entry(Index i, Index j) const {
    return bit(i, j) ? 1.0 : -1.0;
  }

  bool bit(Index i, Index j) const {
    const std::uint64_t w = words_[static_cast<std::size_t>(i) * stride_ +
                                   static_cast<std::size_t>(j >> 6)];
    return (w >> (j & 63)) & 1u;
  }

  Eigen::VectorXd row_signs(Index i) const;

  // Copy with row i replaced by the given +-1 row (counts updated in O(d)).
  Database with_row_replaced(Index i, const Eigen::VectorXd& row) const;

  // Exact per-column +1 counts.
  const std::vector<std::int64_t>& plus_counts() const { return counts_; }

  // The one-way marginals (1/n) * sum of rows; exact up to one final
  // rounding since the column sums are integers.
  const MarginalVector& marginals() const { return marginals_; }

  bool operator==(const Database& other) const {
    return n_ == other.n_ && d_ == other.d_ && words_ == other.words_;
  }

  void write_binary(std::ostream& out) const;
  void write_text(std::ostream& out) const;
  static Database read_binary(std::istream& in);
  static Database read_text(std::istream& in);

  // Sniffs the magic header to pick the binary or text reader.
  static Database load(const std::string& path);
  void save_binary(const std::string& path) const;
  void save_text(const std::string& path) const;

  // Trusted builders (k-copy embedding, generators) construct directly from
  // packed words plus the exact counts they already know.
  static Database from_words(Index n, Index d, std::vector<std::uint64_t> words,
                             std::vector<std::int64_t> counts);

  std::size_t row_stride_words() const { return stride_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  Database(Index n, Index d, std::vector<std::uint64_t> words,
           std::vector<std::int64_t> counts);

  static std::vector<std::int64_t> count_columns(
      Index n, Index d, const std::vector<std::uint64_t>& words);
  void finish();  // computes marginals_ from counts_

  Index n_ = 0;
  Index d_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::int64_t> counts_;
  MarginalVector marginals_;
};

// Free-function form of Database::marginals().
inline MarginalVector compute_marginals(const Database& db) {
  return db.marginals();
}

}  // namespace marginalpriv

#endif  // MARGINALPRIV_DATABASE_HPP
