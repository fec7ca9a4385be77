// Random-matrix construction and least-squares solvers.
#pragma once

#include "mag/matrix.hpp"
#include "mag/rng.hpp"

namespace mag {

enum class EnsembleKind { kIidGaussian, kBlockOrthogonal };

// rows x cols matrix of iid N(0,1) entries, row-major fill order.
Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, RngStream rng);

// m x d block-orthogonal ensemble: independent blocks of up to d rows, rows
// exactly orthogonal within a block, each row rescaled by an independent
// chi(d) draw so marginals stay N(0, I_d).
Matrix sample_orthogonal_matrix(std::size_t m, std::size_t d, RngStream rng);

Matrix sample_feature_matrix(EnsembleKind kind, std::size_t m, std::size_t d,
                             RngStream rng);

struct LeastSquaresSolution {
  Matrix x;             // m x l
  bool rank_deficient;  // true when the ridge-free pseudoinverse path saw rank < m
};

// Minimizes |A X - B|_F^2 + ridge |X|_F^2. With ridge = 0 and singular A^T A,
// returns the minimum-norm solution.
LeastSquaresSolution solve_least_squares_ex(const Matrix& a, const Matrix& b,
                                            double ridge);
Matrix solve_least_squares(const Matrix& a, const Matrix& b, double ridge);

}  // namespace mag
