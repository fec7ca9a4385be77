// Monte-Carlo estimators for the magnituder kernel and the SNNK comparison
// kernel, closed-form expectations where they exist, and an ensemble-variance
// harness with jackknife error bars.
#pragma once

#include "mag/matrix.hpp"
#include "mag/numerics.hpp"

#include <vector>

namespace mag {

enum class ScalarFunctionKind { kRelu, kExp, kSoftplus, kSin, kCos, kSign };

struct ScalarFunction {
  ScalarFunctionKind kind = ScalarFunctionKind::kRelu;
  double param = 1.0;  // c for exp(c z), beta for softplus

  static ScalarFunction relu() { return {ScalarFunctionKind::kRelu, 1.0}; }
  static ScalarFunction exp(double c) { return {ScalarFunctionKind::kExp, c}; }
  static ScalarFunction softplus(double beta) {
    return {ScalarFunctionKind::kSoftplus, beta};
  }
  static ScalarFunction sin() { return {ScalarFunctionKind::kSin, 1.0}; }
  static ScalarFunction cos() { return {ScalarFunctionKind::kCos, 1.0}; }
  static ScalarFunction sign() { return {ScalarFunctionKind::kSign, 1.0}; }

  double operator()(double z) const;
};

std::vector<ScalarFunction> uniform_functions(ScalarFunction f, std::size_t d);

enum class KernelKind { kMag, kSnnk };

// For kMag, functions has one entry per input coordinate (length d).
// For kSnnk, functions is the (phi, psi) pair (length 2).
struct KernelEstimator {
  KernelKind kernel = KernelKind::kMag;
  EnsembleKind ensemble = EnsembleKind::kBlockOrthogonal;
  std::size_t features = 1;  // m
  std::vector<ScalarFunction> functions;
  RngStream rng;
};

// sum_i u_i f_i(v^T g_i) with one feature vector per coordinate; for m > d the
// estimate averages ceil(m/d) independent d-feature repetitions (one ensemble
// block each), which keeps it unbiased at every m.
double kernel_mag_estimate(const Matrix& u, const Matrix& v,
                           const KernelEstimator& est);

// Closed-form K_MAG for functions with known Gaussian expectations:
// E[relu(a g)] = a / sqrt(2 pi), E[exp(c a g)] = exp(c^2 a^2 / 2), a = |v|_2.
double kernel_mag_exact(const Matrix& u, const Matrix& v,
                        const std::vector<ScalarFunction>& functions);

// (1/m) sum_i phi(u^T g_i) psi(v^T g_i).
double kernel_snnk_estimate(const Matrix& u, const Matrix& v,
                            const KernelEstimator& est);

struct VarianceReport {
  double variance = 0.0;       // unbiased sample variance across resamplings
  std::size_t trials = 0;
  double standard_error = 0.0; // jackknife SE of the variance estimate
};

// Redraws the ensemble `trials` times (independent substreams of est.rng) and
// measures the spread of the kernel estimate.
VarianceReport estimator_variance(const Matrix& u, const Matrix& v,
                                  const KernelEstimator& est, std::size_t trials);

}  // namespace mag
