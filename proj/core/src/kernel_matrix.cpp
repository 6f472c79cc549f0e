#include "wlks/kernel_matrix.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "wlks/error.hpp"

namespace wlks {

KernelMatrix::KernelMatrix(std::size_t rows, std::size_t cols, bool symmetric)
    : rows_(rows), cols_(cols), symmetric_(symmetric), values_(rows * cols, 0.0) {
  if (symmetric && rows != cols) throw ContractError("symmetric kernel matrix must be square");
}

KernelMatrix KernelMatrix::identity(std::size_t n) {
  KernelMatrix k(n, n, true);
  for (std::size_t i = 0; i < n; ++i) k(i, i) = 1.0;
  return k;
}

double KernelMatrix::trace() const noexcept {
  double t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool KernelMatrix::is_exactly_symmetric() const noexcept {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

bool KernelMatrix::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

KernelMatrix KernelMatrix::select(std::span<const std::size_t> r, std::span<const std::size_t> c) const {
  const bool sym = symmetric_ && r.size() == c.size() && std::equal(r.begin(), r.end(), c.begin());
  KernelMatrix out(r.size(), c.size(), sym);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= rows_) throw ContractError("select: row index out of range");
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] >= cols_) throw ContractError("select: column index out of range");
      out(i, j) = (*this)(r[i], c[j]);
    }
  }
  return out;
}

void write_text(const KernelMatrix& k, std::ostream& out) {
  out << k.rows() << ' ' << k.cols() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, k(i, j));
      if (j) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

KernelMatrix read_text(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw ParseError("kernel text: missing 'rows cols' header", 1);
  KernelMatrix k(rows, cols);
  std::string tok;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(in >> tok)) throw ParseError("kernel text: truncated", i + 2);
      double v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("kernel text: bad value '" + tok + "'", i + 2);
      }
      k(i, j) = v;
    }
  }
  k.set_symmetric(k.is_exactly_symmetric());
  return k;
}

namespace {

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("kernel binary: truncated", 0);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_binary(const KernelMatrix& k, std::ostream& out) {
  put_u64(out, k.rows());
  put_u64(out, k.cols());
  for (double v : k.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

KernelMatrix read_binary(std::istream& in) {
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  KernelMatrix k(rows, cols);
  for (auto& v : k.values()) v = std::bit_cast<double>(get_u64(in));
  k.set_symmetric(k.is_exactly_symmetric());
  return k;
}

}  // namespace wlks
