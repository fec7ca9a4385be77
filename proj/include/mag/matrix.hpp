// Dense row-major matrix of doubles. The single data carrier shared by the
// sampling, layer, kernel, and solver code.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mag {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("Matrix: data length != rows*cols");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool all_finite() const;
  Matrix transposed() const;

  // Rows [begin, end) as a new matrix.
  Matrix row_block(std::size_t begin, std::size_t end) const;
  // Columns [begin, end) as a new matrix.
  Matrix col_block(std::size_t begin, std::size_t end) const;

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a (r x k) times b (k x c).
Matrix matmul(const Matrix& a, const Matrix& b);
// a (r x k) times b^T where b is (c x k).
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T (k x r -> r x k) times b (k x c)... i.e. a is (k x r), result (r x c).
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// Horizontal concatenation [a | b]; row counts must match.
Matrix hcat(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

void throw_if_not_finite(const Matrix& m, const char* context);

}  // namespace mag
