#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace aquanet {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  bool operator==(const Triplet&) const = default;
};

// Compressed sparse rows, filled row by row. Rows must be added in
// nondecreasing order; duplicate (row, col) entries are summed on read.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols) { reset(rows, cols); }

  // Clears the contents but keeps allocated capacity.
  void reset(std::size_t rows, std::size_t cols);
  void add(std::size_t row, std::size_t col, double value);
  // Closes any trailing empty rows; call once after the last add.
  void finish();

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  double coeff(std::size_t row, std::size_t col) const;
  // y += M x
  void multiply_add(std::span<const double> x, std::span<double> y) const;
  std::vector<Triplet> triplets() const;  // duplicates merged, sorted
  bool is_identity() const;

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_index() const noexcept { return cols_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  static CsrMatrix identity(std::size_t n);

  bool operator==(const CsrMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t open_row_ = 0;  // rows [0, open_row_) are closed
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_idx_;
  std::vector<double> values_;
};

// One `row col value` line per stored entry, 17 significant digits.
void write_triplets(std::ostream& out, const CsrMatrix& m);

}  // namespace aquanet
