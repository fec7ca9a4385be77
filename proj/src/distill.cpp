#include "mag/distill.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mag {

CaptureDataset capture(const NetworkSpec& net, std::size_t layer_index,
                       const Matrix& probe_inputs) {
  validate_network(net);
  if (layer_index >= net.layers.size())
    throw std::invalid_argument("capture: layer index out of range");
  auto trace = network_forward_trace(net, probe_inputs);
  CaptureDataset ds;
  ds.x = std::move(trace[layer_index].input);
  ds.y = std::move(trace[layer_index].output);
  ds.network_id = net.name;
  ds.layer_index = layer_index;
  ds.probe_description =
      "forward over " + std::to_string(probe_inputs.rows()) + " probe rows";
  return ds;
}

CaptureDataset subsample(const CaptureDataset& ds, double fraction, RngStream rng) {
  if (ds.x.rows() == 0 || ds.x.rows() != ds.y.rows())
    throw std::invalid_argument("subsample: malformed capture dataset");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("subsample: fraction must be in (0, 1]");
  const std::size_t n = ds.x.rows();
  const std::size_t keep = static_cast<std::size_t>(
      std::max(1.0, std::floor(fraction * static_cast<double>(n))));

  // Partial Fisher-Yates: the first `keep` entries are a uniform sample.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng r(rng);
  for (std::size_t i = 0; i < keep; ++i)
    std::swap(order[i], order[i + r.index(n - i)]);

  CaptureDataset out;
  out.x = Matrix(keep, ds.x.cols());
  out.y = Matrix(keep, ds.y.cols());
  for (std::size_t i = 0; i < keep; ++i) {
    for (std::size_t j = 0; j < ds.x.cols(); ++j) out.x(i, j) = ds.x(order[i], j);
    for (std::size_t j = 0; j < ds.y.cols(); ++j) out.y(i, j) = ds.y(order[i], j);
  }
  out.network_id = ds.network_id;
  out.layer_index = ds.layer_index;
  out.probe_description = ds.probe_description + "; subsampled " +
                          std::to_string(keep) + "/" + std::to_string(n);
  return out;
}

DistillResult distill_closed_form_with_g(const CaptureDataset& ds, Matrix g,
                                         EnsembleKind ensemble,
                                         RngStream g_stream, double ridge) {
  if (ds.x.rows() == 0 || ds.x.rows() != ds.y.rows())
    throw std::invalid_argument("distill: malformed capture dataset");
  if (g.cols() != ds.x.cols())
    throw std::invalid_argument("distill: feature matrix width != capture input dim");
  if (!(ridge >= 0.0))
    throw std::invalid_argument("distill: ridge must be >= 0");

  const auto t0 = std::chrono::steady_clock::now();
  Matrix phi = apply(Activation::relu(), matmul_nt(ds.x, g));

  DistillResult result;
  result.layer.g = std::move(g);
  result.layer.act = Activation::relu();
  result.layer.ensemble = ensemble;
  result.layer.g_stream = g_stream;
  result.report.features = result.layer.g.rows();
  result.report.ridge = ridge;

  bool all_zero = true;
  for (double v : phi.storage())
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) {
    result.layer.w = Matrix(ds.y.cols(), result.layer.g.rows());
    result.report.rank_deficient = true;
  } else {
    auto sol = solve_least_squares_ex(phi, ds.y, ridge);
    result.layer.w = sol.x.transposed();
    result.report.rank_deficient = sol.rank_deficient;
  }

  Matrix fit = matmul_nt(phi, result.layer.w);
  double sse = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double d = fit.storage()[i] - ds.y.storage()[i];
    sse += d * d;
  }
  result.report.fit_mse = sse / static_cast<double>(fit.size());
  result.report.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

DistillResult distill_closed_form(const CaptureDataset& ds, std::size_t features,
                                  EnsembleKind ensemble, RngStream rng,
                                  double ridge) {
  if (features == 0) throw std::invalid_argument("distill: m must be >= 1");
  Matrix g = sample_feature_matrix(ensemble, features, ds.x.cols(), rng);
  return distill_closed_form_with_g(ds, std::move(g), ensemble, rng, ridge);
}

NetworkSpec replace_layer(const NetworkSpec& net, std::size_t layer_index,
                          const MagLayer& mag) {
  if (layer_index >= net.layers.size())
    throw std::invalid_argument("replace_layer: layer index out of range");
  const Layer& old = net.layers[layer_index];
  if (mag.in_dim() != layer_in_dim(old) || mag.out_dim() != layer_out_dim(old))
    throw std::invalid_argument("replace_layer: interface mismatch");
  NetworkSpec out = net;
  out.layers[layer_index] = mag;
  validate_network(out);
  return out;
}

}  // namespace mag
