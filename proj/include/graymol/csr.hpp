#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

namespace graymol {

/// Minimal real-valued CSR matrix with deterministic assembly order, used for
/// the sparse coupling blocks of the Hamiltonian. Entries with equal (row,col)
/// are summed; rows and columns are sorted so identical inputs yield
/// bit-identical storage.
class Csr {
 public:
  Csr() = default;

  struct Triplet {
    int row;
    int col;
    double value;
  };

  static Csr from_triplets(int rows, int cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      if (a.row != b.row) return a.row < b.row;
      return a.col < b.col;
    });
    Csr m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(std::size_t(rows) + 1, 0);
    for (std::size_t i = 0; i < t.size();) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col)
        sum += t[j++].value;
      if (sum != 0.0) {
        m.col_.push_back(t[i].col);
        m.val_.push_back(sum);
        ++m.row_ptr_[std::size_t(t[i].row) + 1];
      }
      i = j;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr_[std::size_t(r) + 1] += m.row_ptr_[std::size_t(r)];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }

  /// y += scale * A x
  void accumulate(std::complex<double> scale, const std::complex<double>* x,
                  std::complex<double>* y) const {
    for (int r = 0; r < rows_; ++r) {
      std::complex<double> acc{0.0, 0.0};
      const std::size_t end = row_ptr_[std::size_t(r) + 1];
      for (std::size_t k = row_ptr_[std::size_t(r)]; k < end; ++k)
        acc += val_[k] * x[col_[k]];
      y[r] += scale * acc;
    }
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[std::size_t(r)]; k < row_ptr_[std::size_t(r) + 1]; ++k)
        fn(r, col_[k], val_[k]);
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

}  // namespace graymol
