// Element-wise activations shared by dense and random-feature layers.
#pragma once

#include "mag/matrix.hpp"

namespace mag {

enum class ActKind { kRelu, kSoftplus, kIdentity, kSigmoid };

struct Activation {
  ActKind kind = ActKind::kRelu;
  double beta = 1.0;  // softplus sharpness, > 0

  static Activation relu() { return {ActKind::kRelu, 1.0}; }
  static Activation softplus(double beta);
  static Activation identity() { return {ActKind::kIdentity, 1.0}; }
  static Activation sigmoid() { return {ActKind::kSigmoid, 1.0}; }

  double value(double x) const;
  double derivative(double x) const;  // d value / d x at pre-activation x

  bool operator==(const Activation&) const = default;
};

Matrix apply(const Activation& act, const Matrix& z);
// Derivative evaluated at pre-activations z, element-wise.
Matrix apply_derivative(const Activation& act, const Matrix& z);

}  // namespace mag
