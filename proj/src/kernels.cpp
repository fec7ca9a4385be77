#include "mag/kernels.hpp"

#include <cmath>
#include <numbers>

namespace mag {

namespace {

void require_row_vector(const Matrix& m, const char* name) {
  if (m.rows() != 1 || m.cols() == 0)
    throw std::invalid_argument(std::string("kernel: ") + name +
                                " must be a 1 x d matrix");
}

double dot_row(const Matrix& v, const Matrix& g, std::size_t g_row) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.cols(); ++j) s += v(0, j) * g(g_row, j);
  return s;
}

double norm_row(const Matrix& v) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.cols(); ++j) s += v(0, j) * v(0, j);
  return std::sqrt(s);
}

}  // namespace

double ScalarFunction::operator()(double z) const {
  switch (kind) {
    case ScalarFunctionKind::kRelu:
      return z > 0.0 ? z : 0.0;
    case ScalarFunctionKind::kExp:
      return std::exp(param * z);
    case ScalarFunctionKind::kSoftplus: {
      const double bz = param * z;
      if (bz > 30.0) return z;
      return std::log1p(std::exp(bz)) / param;
    }
    case ScalarFunctionKind::kSin:
      return std::sin(z);
    case ScalarFunctionKind::kCos:
      return std::cos(z);
    case ScalarFunctionKind::kSign:
      return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
  }
  return z;
}

std::vector<ScalarFunction> uniform_functions(ScalarFunction f, std::size_t d) {
  return std::vector<ScalarFunction>(d, f);
}

double kernel_mag_estimate(const Matrix& u, const Matrix& v,
                           const KernelEstimator& est) {
  require_row_vector(u, "u");
  require_row_vector(v, "v");
  if (u.cols() != v.cols())
    throw std::invalid_argument("kernel_mag_estimate: u and v dimensions differ");
  const std::size_t d = u.cols();
  if (est.functions.size() != d)
    throw std::invalid_argument(
        "kernel_mag_estimate: needs one scalar function per coordinate");
  if (est.features == 0)
    throw std::invalid_argument("kernel_mag_estimate: m must be >= 1");

  const std::size_t reps = (est.features + d - 1) / d;
  const Matrix g = sample_feature_matrix(est.ensemble, reps * d, d, est.rng);
  double acc = 0.0;
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t i = 0; i < d; ++i)
      acc += u(0, i) * est.functions[i](dot_row(v, g, r * d + i));
  return acc / static_cast<double>(reps);
}

double kernel_mag_exact(const Matrix& u, const Matrix& v,
                        const std::vector<ScalarFunction>& functions) {
  require_row_vector(u, "u");
  require_row_vector(v, "v");
  if (u.cols() != v.cols())
    throw std::invalid_argument("kernel_mag_exact: u and v dimensions differ");
  if (functions.size() != u.cols())
    throw std::invalid_argument(
        "kernel_mag_exact: needs one scalar function per coordinate");
  const double a = norm_row(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const ScalarFunction& f = functions[i];
    double expectation;
    switch (f.kind) {
      case ScalarFunctionKind::kRelu:
        expectation = a / std::sqrt(2.0 * std::numbers::pi);
        break;
      case ScalarFunctionKind::kExp:
        expectation = std::exp(0.5 * f.param * f.param * a * a);
        break;
      default:
        throw std::invalid_argument(
            "kernel_mag_exact: closed form known for relu and exp only");
    }
    acc += u(0, i) * expectation;
  }
  return acc;
}

double kernel_snnk_estimate(const Matrix& u, const Matrix& v,
                            const KernelEstimator& est) {
  require_row_vector(u, "u");
  require_row_vector(v, "v");
  if (u.cols() != v.cols())
    throw std::invalid_argument("kernel_snnk_estimate: u and v dimensions differ");
  if (est.functions.size() != 2)
    throw std::invalid_argument(
        "kernel_snnk_estimate: needs the (phi, psi) function pair");
  if (est.features == 0)
    throw std::invalid_argument("kernel_snnk_estimate: m must be >= 1");

  const Matrix g =
      sample_feature_matrix(est.ensemble, est.features, u.cols(), est.rng);
  const ScalarFunction& phi = est.functions[0];
  const ScalarFunction& psi = est.functions[1];
  double acc = 0.0;
  for (std::size_t i = 0; i < est.features; ++i)
    acc += phi(dot_row(u, g, i)) * psi(dot_row(v, g, i));
  return acc / static_cast<double>(est.features);
}

VarianceReport estimator_variance(const Matrix& u, const Matrix& v,
                                  const KernelEstimator& est,
                                  std::size_t trials) {
  if (trials < 100)
    throw std::invalid_argument("estimator_variance: needs trials >= 100");

  std::vector<double> values(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    KernelEstimator trial = est;
    trial.rng = est.rng.substream(t);
    values[t] = est.kernel == KernelKind::kMag
                    ? kernel_mag_estimate(u, v, trial)
                    : kernel_snnk_estimate(u, v, trial);
  }

  const double n = static_cast<double>(trials);
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double variance = ss / (n - 1.0);

  // Leave-one-out variances in closed form, then the jackknife SE.
  // With mean_i = (n mean - x_i)/(n-1):
  //   ss_i = ss - (x_i - mean)^2 * n/(n-1),  var_i = ss_i/(n-2).
  double jk_mean = 0.0;
  std::vector<double> loo(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const double di = values[i] - mean;
    const double ss_i = ss - di * di * n / (n - 1.0);
    loo[i] = ss_i / (n - 2.0);
    jk_mean += loo[i];
  }
  jk_mean /= n;
  double jk_ss = 0.0;
  for (double x : loo) jk_ss += (x - jk_mean) * (x - jk_mean);
  const double se = std::sqrt((n - 1.0) / n * jk_ss);

  return VarianceReport{variance, trials, se};
}

}  // namespace mag
