#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

namespace wlks {

/// Dense row-major real matrix of pairwise similarities. Square grams are
/// flagged symmetric; cross grams (test x train) are rectangular.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  KernelMatrix(std::size_t rows, std::size_t cols, bool symmetric = false);

  static KernelMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool symmetric() const noexcept { return symmetric_; }
  void set_symmetric(bool s) noexcept { symmetric_ = s; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double trace() const noexcept;
  /// True when square and values[i][j] == values[j][i] exactly.
  bool is_exactly_symmetric() const noexcept;
  bool all_finite() const noexcept;

  /// Rows `r` and columns `c` of this matrix, in the given order.
  KernelMatrix select(std::span<const std::size_t> r, std::span<const std::size_t> c) const;

  friend bool operator==(const KernelMatrix&, const KernelMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool symmetric_ = false;
  std::vector<double> values_;
};

/// Text dump: "rows cols" then one line per row. Values are printed with
/// round-trip precision.
void write_text(const KernelMatrix& k, std::ostream& out);
KernelMatrix read_text(std::istream& in);

/// Binary dump: two little-endian uint64 counts (rows, cols) followed by
/// rows*cols little-endian IEEE-754 doubles, row-major.
void write_binary(const KernelMatrix& k, std::ostream& out);
KernelMatrix read_binary(std::istream& in);

}  // namespace wlks
