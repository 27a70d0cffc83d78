#include "marginalpriv/database.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace marginalpriv {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'P', 'R', 'I', 'V', 'D', 'B', '1'};

void write_u64le(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

std::uint64_t read_u64le(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw IoError("truncated database header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

}  // namespace

Database::Database(Index n, Index d, std::vector<std::uint64_t> words,
                   std::vector<std::int64_t> counts)
    : n_(n),
      d_(d),
      stride_(static_cast<std::size_t>((d + 63) / 64)),
      words_(std::move(words)),
      counts_(std::move(counts)) {
  if (n_ < 1 || d_ < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  if (words_.size() != stride_ * static_cast<std::size_t>(n_))
    throw std::invalid_argument("packed word buffer has wrong size");
  finish();
}

void Database::finish() {
  marginals_.resize(d_);
  const double n = static_cast<double>(n_);
  for (Index j = 0; j < d_; ++j)
    marginals_[j] = static_cast<double>(2 * counts_[static_cast<std::size_t>(j)] - n_) / n;
}

std::vector<std::int64_t> Database::count_columns(
    Index n, Index d, const std::vector<std::uint64_t>& words) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (std::size_t w = 0; w < stride; ++w) {
      std::uint64_t bits = row[w];
      const std::size_t base = w * 64;
      while (bits) {
        const int b = __builtin_ctzll(bits);
        counts[base + static_cast<std::size_t>(b)]++;
        bits &= bits - 1;
      }
    }
  }
  return counts;
}

Database Database::from_words(Index n, Index d, std::vector<std::uint64_t> words,
                              std::vector<std::int64_t> counts) {
  return Database(n, d, std::move(words), std::move(counts));
}

Database Database::from_signs(const Eigen::MatrixXd& rows) {
  const Index n = rows.rows(), d = rows.cols();
  if (n < 1 || d < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < n; ++i) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (Index j = 0; j < d; ++j) {
      const double v = rows(i, j);
      if (v == 1.0) {
        row[j >> 6] |= 1ull << (j & 63);
        counts[static_cast<std::size_t>(j)]++;
      } else if (v != -1.0) {
        throw std::invalid_argument("database entries must be exactly +1 or -1");
      }
    }
  }
  return Database(n, d, std::move(words), std::move(counts));
}

Database Database::random_uniform(Index n, Index d, Rng& rng) {
  if (n < 1 || d < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n));
  const int tail_bits = static_cast<int>(d & 63);
  const std::uint64_t tail_mask =
      tail_bits == 0 ? ~0ull : ((1ull << tail_bits) - 1);
  for (Index i = 0; i < n; ++i) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (std::size_t w = 0; w < stride; ++w) row[w] = rng.next_u64();
    row[stride - 1] &= tail_mask;
  }
  auto counts = count_columns(n, d, words);
  return Database(n, d, std::move(words), std::move(counts));
}

Database Database::random_biased(Index n, Index d, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bias p must be in [0, 1]");
  if (n < 1 || d < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < n; ++i) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (Index j = 0; j < d; ++j) {
      if (rng.bernoulli(p)) {
        row[j >> 6] |= 1ull << (j & 63);
        counts[static_cast<std::size_t>(j)]++;
      }
    }
  }
  return Database(n, d, std::move(words), std::move(counts));
}

Database Database::column_biased(Index n, const Eigen::VectorXd& biases, Rng& rng) {
  const Index d = biases.size();
  if (n < 1 || d < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < n; ++i) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (Index j = 0; j < d; ++j) {
      if (rng.bernoulli(biases[j])) {
        row[j >> 6] |= 1ull << (j & 63);
        counts[static_cast<std::size_t>(j)]++;
      }
    }
  }
  return Database(n, d, std::move(words), std::move(counts));
}

Database Database::repeat_row(const Eigen::VectorXd& row, Index n) {
  const Index d = row.size();
  if (n < 1 || d < 1) throw std::invalid_argument("database needs n >= 1, d >= 1");
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> first(stride, 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
  for (Index j = 0; j < d; ++j) {
    const double v = row[j];
    if (v == 1.0) {
      first[j >> 6] |= 1ull << (j & 63);
      counts[static_cast<std::size_t>(j)] = n;
    } else if (v != -1.0) {
      throw std::invalid_argument("database entries must be exactly +1 or -1");
    }
  }
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    std::memcpy(words.data() + static_cast<std::size_t>(i) * stride, first.data(),
                stride * sizeof(std::uint64_t));
  return Database(n, d, std::move(words), std::move(counts));
}

Eigen::VectorXd Database::row_signs(Index i) const {
  Eigen::VectorXd out(d_);
  for (Index j = 0; j < d_; ++j) out[j] = entry(i, j);
  return out;
}

Database Database::with_row_replaced(Index i, const Eigen::VectorXd& row) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("row index out of range");
  if (row.size() != d_) throw std::invalid_argument("replacement row has wrong dimension");
  std::vector<std::uint64_t> words = words_;
  std::vector<std::int64_t> counts = counts_;
  std::uint64_t* r = words.data() + static_cast<std::size_t>(i) * stride_;
  for (Index j = 0; j < d_; ++j) {
    const bool old_bit = (r[j >> 6] >> (j & 63)) & 1u;
    const double v = row[j];
    if (v != 1.0 && v != -1.0)
      throw std::invalid_argument("database entries must be exactly +1 or -1");
    const bool new_bit = v == 1.0;
    if (old_bit != new_bit) {
      r[j >> 6] ^= 1ull << (j & 63);
      counts[static_cast<std::size_t>(j)] += new_bit ? 1 : -1;
    }
  }
  return Database(n_, d_, std::move(words), std::move(counts));
}

void Database::write_binary(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_u64le(out, static_cast<std::uint64_t>(n_));
  write_u64le(out, static_cast<std::uint64_t>(d_));
  // Repack the padded in-memory rows into a contiguous bit stream.
  const std::uint64_t total_bits =
      static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(d_);
  const std::size_t total_bytes = static_cast<std::size_t>((total_bits + 7) / 8);
  std::vector<unsigned char> bytes(total_bytes, 0);
  std::uint64_t pos = 0;
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < d_; ++j, ++pos) {
      if (bit(i, j)) bytes[static_cast<std::size_t>(pos >> 3)] |= 1u << (pos & 7);
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing database");
}

Database Database::read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("bad database magic header");
  const std::uint64_t n64 = read_u64le(in);
  const std::uint64_t d64 = read_u64le(in);
  if (n64 == 0 || d64 == 0) throw IoError("database dimensions must be positive");
  const std::uint64_t total_bits = n64 * d64;
  if (d64 != 0 && total_bits / d64 != n64) throw IoError("database dimensions overflow");
  const std::size_t total_bytes = static_cast<std::size_t>((total_bits + 7) / 8);
  std::vector<unsigned char> bytes(total_bytes);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(total_bytes));
  if (static_cast<std::size_t>(in.gcount()) != total_bytes)
    throw IoError("database payload shorter than n*d bits");
  if (in.peek() != std::istream::traits_type::eof())
    throw IoError("database payload longer than n*d bits");
  const Index n = static_cast<Index>(n64), d = static_cast<Index>(d64);
  const std::size_t stride = static_cast<std::size_t>((d + 63) / 64);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n), 0);
  std::uint64_t pos = 0;
  for (Index i = 0; i < n; ++i) {
    std::uint64_t* row = words.data() + static_cast<std::size_t>(i) * stride;
    for (Index j = 0; j < d; ++j, ++pos) {
      if ((bytes[static_cast<std::size_t>(pos >> 3)] >> (pos & 7)) & 1u)
        row[j >> 6] |= 1ull << (j & 63);
    }
  }
  auto counts = count_columns(n, d, words);
  return Database(n, d, std::move(words), std::move(counts));
}

void Database::write_text(std::ostream& out) const {
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < d_; ++j) out.put(bit(i, j) ? '+' : '-');
    out.put('\n');
  }
  if (!out) throw IoError("failed writing database");
}

Database Database::read_text(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw IoError("empty text database");
  const std::size_t d = lines.front().size();
  const Index n = static_cast<Index>(lines.size());
  const std::size_t stride = (d + 63) / 64;
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(d, 0);
  for (Index i = 0; i < n; ++i) {
    const std::string& row = lines[static_cast<std::size_t>(i)];
    if (row.size() != d) throw IoError("text database has ragged rows");
    std::uint64_t* w = words.data() + static_cast<std::size_t>(i) * stride;
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] == '+') {
        w[j >> 6] |= 1ull << (j & 63);
        counts[j]++;
      } else if (row[j] != '-') {
        throw IoError("text database rows must use '+' and '-'");
      }
    }
  }
  return Database(n, static_cast<Index>(d), std::move(words), std::move(counts));
}

Database Database::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  in.clear();
  in.seekg(0);
  if (in && magic == kMagic) return read_binary(in);
  return read_text(in);
}

void Database::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_binary(out);
}

void Database::save_text(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_text(out);
}

}  // namespace marginalpriv
