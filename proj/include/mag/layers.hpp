// Layer types and forward evaluation: dense layers, random-feature MAG layers
// of the form W f(Gx), bundled inference layers, and layer graphs with
// skip-concatenation and named output heads.
#pragma once

#include "mag/activation.hpp"
#include "mag/matrix.hpp"
#include "mag/numerics.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mag {

struct DenseLayer {
  Matrix w;                  // out x in
  std::vector<double> bias;  // length out
  Activation act;

  std::size_t in_dim() const { return w.cols(); }
  std::size_t out_dim() const { return w.rows(); }
};

// Trainable W over frozen random features f(Gx). G is never updated; its
// generating stream is kept so a serialized layer can be re-verified.
struct MagLayer {
  Matrix w;                  // l x m, trainable
  Matrix g;                  // m x d, frozen
  Activation act;            // feature nonlinearity f
  std::vector<double> bias;  // length l, empty = no bias (the default form)
  EnsembleKind ensemble = EnsembleKind::kBlockOrthogonal;
  RngStream g_stream;

  std::size_t in_dim() const { return g.cols(); }
  std::size_t feature_dim() const { return g.rows(); }
  std::size_t out_dim() const { return w.rows(); }
};

// Inference-only result of bundling a MAG layer with following affine maps.
// Forward: output_act(f(X G^T) W_hat^T + X_orig concat_w^T + bias).
struct FusedLayer {
  Matrix w_hat;              // out x m
  std::vector<double> bias;  // length out
  Matrix g;                  // m x d
  Activation feature_act;
  Activation output_act;
  Matrix concat_w;           // out x concat_dim; empty when no concat path
  EnsembleKind ensemble = EnsembleKind::kBlockOrthogonal;
  RngStream g_stream;

  std::size_t in_dim() const { return g.cols(); }
  std::size_t feature_dim() const { return g.rows(); }
  std::size_t out_dim() const { return w_hat.rows(); }
};

using Layer = std::variant<DenseLayer, MagLayer, FusedLayer>;

std::size_t layer_in_dim(const Layer& layer);
std::size_t layer_out_dim(const Layer& layer);

DenseLayer make_dense_layer(std::size_t in, std::size_t out, Activation act,
                            RngStream rng);
MagLayer make_mag_layer(std::size_t in, std::size_t features, std::size_t out,
                        Activation act, EnsembleKind ensemble, RngStream rng,
                        bool with_bias = false);

enum class HeadActivation { kIdentity, kSigmoid, kSoftmax };

struct Head {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
  HeadActivation act = HeadActivation::kIdentity;
};

// Re-injects the original network input in front of the given layer's input:
// layer at_layer sees [original | previous_output].
struct SkipConcat {
  std::size_t at_layer = 0;
};

struct NetworkSpec {
  std::string name;
  std::size_t input_dim = 0;
  std::vector<Layer> layers;
  std::vector<SkipConcat> skips;
  std::vector<Head> heads;

  bool has_skip_at(std::size_t layer_index) const;
};

// Throws invalid_argument on any topology inconsistency (dimension chain,
// skip placement, head slices). Construction-time check; forward assumes it.
void validate_network(const NetworkSpec& net);
NetworkSpec make_network(std::string name, std::size_t input_dim,
                         std::vector<Layer> layers, std::vector<SkipConcat> skips,
                         std::vector<Head> heads);

Matrix mag_forward(const MagLayer& layer, const Matrix& x);
Matrix dense_forward(const DenseLayer& layer, const Matrix& x);
Matrix fused_forward(const FusedLayer& layer, const Matrix& x,
                     const Matrix* original_input);

Matrix apply_head_activation(HeadActivation act, const Matrix& slice);

struct ForwardResult {
  Matrix final_output;                  // post final-layer activation
  std::map<std::string, Matrix> heads;  // post head activation
};
ForwardResult network_forward(const NetworkSpec& net, const Matrix& x);

// Per-layer evaluation trace used by training and activation capture.
struct LayerTrace {
  Matrix input;  // post-concat input to the layer
  Matrix pre;    // dense: pre-activation; mag: feature pre-activation X G^T
  Matrix feat;   // mag only: f(X G^T)
  Matrix output;
};
std::vector<LayerTrace> network_forward_trace(const NetworkSpec& net,
                                              const Matrix& x);

struct ParamCount {
  std::uint64_t trainable = 0;
  std::uint64_t frozen = 0;
};
ParamCount param_count(const NetworkSpec& net);

// Exact per-sample multiply-accumulate count of a forward pass (matrix
// products only, the deterministic cost metric).
std::uint64_t mac_count(const NetworkSpec& net);

}  // namespace mag
