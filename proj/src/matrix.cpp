#include "mag/matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <string>

namespace mag {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using Map = Eigen::Map<EigenRowMajor>;

ConstMap as_eigen(const Matrix& m) {
  return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Matrix Matrix::row_block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_)
    throw std::invalid_argument("Matrix::row_block: bad range");
  Matrix out(end - begin, cols_);
  std::memcpy(out.data(), data_.data() + begin * cols_,
              (end - begin) * cols_ * sizeof(double));
  return out;
}

Matrix Matrix::col_block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols_)
    throw std::invalid_argument("Matrix::col_block: bad range");
  Matrix out(rows_, end - begin);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = (*this)(i, j);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix out(a.rows(), b.cols());
  Map(out.data(), static_cast<Eigen::Index>(out.rows()),
      static_cast<Eigen::Index>(out.cols())).noalias() = as_eigen(a) * as_eigen(b);
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_nt: shape mismatch");
  Matrix out(a.rows(), b.rows());
  Map(out.data(), static_cast<Eigen::Index>(out.rows()),
      static_cast<Eigen::Index>(out.cols())).noalias() =
      as_eigen(a) * as_eigen(b).transpose();
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_tn: shape mismatch");
  Matrix out(a.cols(), b.cols());
  Map(out.data(), static_cast<Eigen::Index>(out.rows()),
      static_cast<Eigen::Index>(out.cols())).noalias() =
      as_eigen(a).transpose() * as_eigen(b);
  return out;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::memcpy(&out(i, 0), a.data() + i * a.cols(), a.cols() * sizeof(double));
    std::memcpy(&out(i, a.cols()), b.data() + i * b.cols(),
                b.cols() * sizeof(double));
  }
  return out;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.storage()) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a.storage()[i] - b.storage()[i]));
  return d;
}

void throw_if_not_finite(const Matrix& m, const char* context) {
  if (!m.all_finite())
    throw std::runtime_error(std::string(context) + ": non-finite entries");
}

}  // namespace mag
