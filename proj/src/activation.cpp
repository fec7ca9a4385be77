#include "mag/activation.hpp"

#include <cmath>

namespace mag {

Activation Activation::softplus(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("softplus: beta must be > 0");
  return {ActKind::kSoftplus, beta};
}

double Activation::value(double x) const {
  switch (kind) {
    case ActKind::kRelu:
      return x > 0.0 ? x : 0.0;
    case ActKind::kSoftplus: {
      const double bx = beta * x;
      if (bx > 30.0) return x;  // log1p(exp(bx))/beta ~ x, avoids overflow
      return std::log1p(std::exp(bx)) / beta;
    }
    case ActKind::kIdentity:
      return x;
    case ActKind::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double Activation::derivative(double x) const {
  switch (kind) {
    case ActKind::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case ActKind::kSoftplus:
      return 1.0 / (1.0 + std::exp(-beta * x));
    case ActKind::kIdentity:
      return 1.0;
    case ActKind::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

Matrix apply(const Activation& act, const Matrix& z) {
  if (act.kind == ActKind::kIdentity) return z;
  Matrix out(z.rows(), z.cols());
  const double* src = z.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) dst[i] = act.value(src[i]);
  return out;
}

Matrix apply_derivative(const Activation& act, const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  const double* src = z.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) dst[i] = act.derivative(src[i]);
  return out;
}

}  // namespace mag
