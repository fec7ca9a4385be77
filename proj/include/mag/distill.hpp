// Backprop-free replacement of a trained layer by a MAG layer: capture the
// layer's input/output pairs, solve the ridge least-squares problem over
// relu(X G^T) features in closed form, and swap the layer.
#pragma once

#include "mag/layers.hpp"

#include <optional>
#include <string>

namespace mag {

struct CaptureDataset {
  Matrix x;  // n x d, inputs reaching the target layer (post-concat)
  Matrix y;  // n x l, target layer outputs, post-activation
  std::string network_id;
  std::size_t layer_index = 0;
  std::string probe_description;
};

// One read-only forward pass; records the designated layer's input and output.
CaptureDataset capture(const NetworkSpec& net, std::size_t layer_index,
                       const Matrix& probe_inputs);

// Uniform row subsample without replacement, X/Y rows kept aligned.
CaptureDataset subsample(const CaptureDataset& ds, double fraction, RngStream rng);

struct DistillReport {
  double fit_mse = 0.0;
  double solve_seconds = 0.0;
  std::size_t features = 0;
  double ridge = 0.0;
  bool rank_deficient = false;
};

struct DistillResult {
  MagLayer layer;
  DistillReport report;
};

// Draws G per ensemble, forms relu(X G^T), and solves for W in closed form.
// An all-zero feature matrix yields a zero W with the flag set, not an error.
DistillResult distill_closed_form(const CaptureDataset& ds, std::size_t features,
                                  EnsembleKind ensemble, RngStream rng,
                                  double ridge = 1e-8);

// Same solve with a caller-provided feature matrix; used for nested-feature
// sweeps (rows of a master G reused as a prefix) and shared-G comparisons.
DistillResult distill_closed_form_with_g(const CaptureDataset& ds, Matrix g,
                                         EnsembleKind ensemble, RngStream g_stream,
                                         double ridge = 1e-8);

// New network with the layer at layer_index swapped for the MAG layer.
NetworkSpec replace_layer(const NetworkSpec& net, std::size_t layer_index,
                          const MagLayer& mag);

}  // namespace mag
