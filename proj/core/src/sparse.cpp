#include "aquanet/sparse.hpp"

#include <algorithm>
#include <ostream>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

void CsrMatrix::reset(std::size_t rows, std::size_t cols) {
  rows_ = rows;
  cols_ = cols;
  open_row_ = 0;
  row_ptr_.clear();
  row_ptr_.push_back(0);
  cols_idx_.clear();
  values_.clear();
}

void CsrMatrix::add(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_) throw Error(ErrorCategory::Solver, "sparse entry out of range");
  if (row < open_row_) throw Error(ErrorCategory::Solver, "sparse rows must be filled in order");
  while (open_row_ < row) {
    row_ptr_.push_back(values_.size());
    ++open_row_;
  }
  cols_idx_.push_back(col);
  values_.push_back(value);
}

void CsrMatrix::finish() {
  while (open_row_ < rows_) {
    row_ptr_.push_back(values_.size());
    ++open_row_;
  }
}

double CsrMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= open_row_) return 0.0;
  double sum = 0.0;
  for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
    if (cols_idx_[k] == col) sum += values_[k];
  }
  return sum;
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < open_row_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[cols_idx_[k]];
    y[r] += acc;
  }
}

std::vector<Triplet> CsrMatrix::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t r = 0; r < open_row_; ++r) {
    const std::size_t first = out.size();
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, cols_idx_[k], values_[k]});
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
              [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
    std::size_t w = first;
    for (std::size_t i = first; i < out.size(); ++i) {
      if (w > first && out[w - 1].col == out[i].col) {
        out[w - 1].value += out[i].value;
      } else {
        out[w++] = out[i];
      }
    }
    out.resize(w);
  }
  return out;
}

bool CsrMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r >= open_row_) return false;
    bool diag = false;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (cols_idx_[k] == r) {
        diag = values_[k] == 1.0;
      } else if (values_[k] != 0.0) {
        return false;
      }
    }
    if (!diag) return false;
  }
  return true;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.add(i, i, 1.0);
  m.finish();
  return m;
}

bool CsrMatrix::operator==(const CsrMatrix& other) const {
  // Stored zeros do not change the matrix.
  auto nonzero = [](std::vector<Triplet> t) {
    std::erase_if(t, [](const Triplet& e) { return e.value == 0.0; });
    return t;
  };
  return rows_ == other.rows_ && cols_ == other.cols_ && nonzero(triplets()) == nonzero(other.triplets());
}

void write_triplets(std::ostream& out, const CsrMatrix& m) {
  for (const auto& t : m.triplets()) out << t.row << ' ' << t.col << ' ' << detail::format_double(t.value) << '\n';
}

}  // namespace aquanet
