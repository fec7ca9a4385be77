#include "mag/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mag {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_positive_dims(std::size_t rows, std::size_t cols, const char* op) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument(std::string(op) + ": dimensions must be >= 1");
}

}  // namespace

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, RngStream rng) {
  require_positive_dims(rows, cols, "sample_gaussian_matrix");
  Matrix out(rows, cols);
  Rng r(rng);
  for (double& v : out.storage()) v = r.normal();
  return out;
}

Matrix sample_orthogonal_matrix(std::size_t m, std::size_t d, RngStream rng) {
  require_positive_dims(m, d, "sample_orthogonal_matrix");
  Matrix out(m, d);
  Rng r(rng);

  const std::size_t blocks = (m + d - 1) / d;
  EigenRowMajor a(d, d);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j)) = r.normal();
    // Orthonormal frame from QR; the R-diagonal sign fix makes it Haar.
    Eigen::HouseholderQR<EigenRowMajor> qr(a);
    EigenRowMajor q = qr.householderQ() * EigenRowMajor::Identity(
                                              static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
    const auto r_diag = qr.matrixQR().diagonal();
    for (std::size_t j = 0; j < d; ++j)
      if (r_diag(static_cast<Eigen::Index>(j)) < 0.0)
        q.col(static_cast<Eigen::Index>(j)) *= -1.0;

    // Row norms resampled from chi(d) so each row keeps N(0, I_d) marginals.
    const std::size_t take = std::min(d, m - b * d);
    for (std::size_t i = 0; i < d; ++i) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double g = r.normal();
        sq += g * g;
      }
      if (i >= take) continue;
      const double norm = std::sqrt(sq);
      const std::size_t row = b * d + i;
      for (std::size_t j = 0; j < d; ++j)
        out(row, j) = norm * q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    }
  }
  throw_if_not_finite(out, "sample_orthogonal_matrix");
  return out;
}

Matrix sample_feature_matrix(EnsembleKind kind, std::size_t m, std::size_t d,
                             RngStream rng) {
  return kind == EnsembleKind::kIidGaussian ? sample_gaussian_matrix(m, d, rng)
                                            : sample_orthogonal_matrix(m, d, rng);
}

LeastSquaresSolution solve_least_squares_ex(const Matrix& a, const Matrix& b,
                                            double ridge) {
  if (a.rows() == 0 || a.cols() == 0 || b.cols() == 0)
    throw std::invalid_argument("solve_least_squares: dimensions must be >= 1");
  if (a.rows() != b.rows())
    throw std::invalid_argument("solve_least_squares: A and B row counts differ");
  if (!(ridge >= 0.0))
    throw std::invalid_argument("solve_least_squares: ridge must be >= 0");

  using Map = Eigen::Map<const EigenRowMajor>;
  Map ea(a.data(), static_cast<Eigen::Index>(a.rows()),
         static_cast<Eigen::Index>(a.cols()));
  Map eb(b.data(), static_cast<Eigen::Index>(b.rows()),
         static_cast<Eigen::Index>(b.cols()));

  LeastSquaresSolution sol;
  sol.x = Matrix(a.cols(), b.cols());
  Eigen::Map<EigenRowMajor> ex(sol.x.data(), static_cast<Eigen::Index>(a.cols()),
                               static_cast<Eigen::Index>(b.cols()));

  if (ridge > 0.0) {
    EigenRowMajor gram = ea.transpose() * ea;
    gram.diagonal().array() += ridge;
    ex = gram.ldlt().solve(ea.transpose() * eb);
    sol.rank_deficient = false;
  } else {
    // Minimum-norm solution; COD handles the rank-deficient pseudoinverse path.
    Eigen::CompleteOrthogonalDecomposition<EigenRowMajor> cod(ea);
    ex = cod.solve(eb);
    sol.rank_deficient =
        cod.rank() < static_cast<Eigen::Index>(a.cols());
  }
  throw_if_not_finite(sol.x, "solve_least_squares");
  return sol;
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b, double ridge) {
  return solve_least_squares_ex(a, b, ridge).x;
}

}  // namespace mag
