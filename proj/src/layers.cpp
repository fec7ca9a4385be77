#include "mag/layers.hpp"

#include <cmath>
#include <cstring>

namespace mag {

namespace {

void add_bias_rows(Matrix& m, const std::vector<double>& bias) {
  if (bias.empty()) return;
  if (bias.size() != m.cols())
    throw std::invalid_argument("bias length does not match output width");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += bias[j];
}

}  // namespace

std::size_t layer_in_dim(const Layer& layer) {
  return std::visit([](const auto& l) { return l.in_dim(); }, layer);
}

std::size_t layer_out_dim(const Layer& layer) {
  return std::visit([](const auto& l) { return l.out_dim(); }, layer);
}

DenseLayer make_dense_layer(std::size_t in, std::size_t out, Activation act,
                            RngStream rng) {
  if (in == 0 || out == 0)
    throw std::invalid_argument("make_dense_layer: dimensions must be >= 1");
  DenseLayer layer;
  layer.w = Matrix(out, in);
  layer.bias.assign(out, 0.0);
  layer.act = act;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Rng r(rng);
  for (double& v : layer.w.storage()) v = (2.0 * r.uniform() - 1.0) * bound;
  for (double& v : layer.bias) v = (2.0 * r.uniform() - 1.0) * bound;
  return layer;
}

MagLayer make_mag_layer(std::size_t in, std::size_t features, std::size_t out,
                        Activation act, EnsembleKind ensemble, RngStream rng,
                        bool with_bias) {
  if (in == 0 || features == 0 || out == 0)
    throw std::invalid_argument("make_mag_layer: dimensions must be >= 1");
  MagLayer layer;
  layer.ensemble = ensemble;
  layer.g_stream = rng.substream(0);
  layer.g = sample_feature_matrix(ensemble, features, in, layer.g_stream);
  layer.act = act;
  layer.w = Matrix(out, features);
  // Fan-in scaling on the feature dimension.
  const double bound = 1.0 / std::sqrt(static_cast<double>(features));
  Rng r(rng.substream(1));
  for (double& v : layer.w.storage()) v = (2.0 * r.uniform() - 1.0) * bound;
  if (with_bias) {
    layer.bias.assign(out, 0.0);
    for (double& v : layer.bias) v = (2.0 * r.uniform() - 1.0) * bound;
  }
  return layer;
}

Matrix mag_forward(const MagLayer& layer, const Matrix& x) {
  if (x.cols() != layer.in_dim())
    throw std::invalid_argument("mag_forward: input width != layer input dim");
  Matrix out = matmul_nt(apply(layer.act, matmul_nt(x, layer.g)), layer.w);
  add_bias_rows(out, layer.bias);
  throw_if_not_finite(out, "mag_forward");
  return out;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
  if (x.cols() != layer.in_dim())
    throw std::invalid_argument("dense_forward: input width != layer input dim");
  Matrix pre = matmul_nt(x, layer.w);
  add_bias_rows(pre, layer.bias);
  Matrix out = apply(layer.act, pre);
  throw_if_not_finite(out, "dense_forward");
  return out;
}

Matrix fused_forward(const FusedLayer& layer, const Matrix& x,
                     const Matrix* original_input) {
  if (x.cols() != layer.in_dim())
    throw std::invalid_argument("fused_forward: input width != layer input dim");
  Matrix pre = matmul_nt(apply(layer.feature_act, matmul_nt(x, layer.g)),
                         layer.w_hat);
  if (!layer.concat_w.empty()) {
    if (original_input == nullptr ||
        original_input->cols() != layer.concat_w.cols())
      throw std::invalid_argument("fused_forward: missing or mismatched concat input");
    Matrix side = matmul_nt(*original_input, layer.concat_w);
    for (std::size_t i = 0; i < pre.size(); ++i)
      pre.storage()[i] += side.storage()[i];
  }
  add_bias_rows(pre, layer.bias);
  Matrix out = apply(layer.output_act, pre);
  throw_if_not_finite(out, "fused_forward");
  return out;
}

bool NetworkSpec::has_skip_at(std::size_t layer_index) const {
  for (const auto& s : skips)
    if (s.at_layer == layer_index) return true;
  return false;
}

void validate_network(const NetworkSpec& net) {
  if (net.input_dim == 0)
    throw std::invalid_argument("network: input_dim must be >= 1");
  if (net.layers.empty())
    throw std::invalid_argument("network: needs at least one layer");
  for (const auto& s : net.skips) {
    if (s.at_layer == 0 || s.at_layer >= net.layers.size())
      throw std::invalid_argument("network: skip index out of range");
  }
  std::size_t width = net.input_dim;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    std::size_t expected = width;
    if (net.has_skip_at(i)) expected += net.input_dim;
    if (layer_in_dim(net.layers[i]) != expected)
      throw std::invalid_argument(
          "network: layer " + std::to_string(i) + " expects input dim " +
          std::to_string(layer_in_dim(net.layers[i])) + " but receives " +
          std::to_string(expected));
    width = layer_out_dim(net.layers[i]);
  }
  for (const auto& h : net.heads) {
    if (h.width == 0 || h.offset + h.width > width)
      throw std::invalid_argument("network: head '" + h.name +
                                  "' slice out of range");
    if (h.name.empty())
      throw std::invalid_argument("network: head names must be nonempty");
  }
}

NetworkSpec make_network(std::string name, std::size_t input_dim,
                         std::vector<Layer> layers, std::vector<SkipConcat> skips,
                         std::vector<Head> heads) {
  NetworkSpec net;
  net.name = std::move(name);
  net.input_dim = input_dim;
  net.layers = std::move(layers);
  net.skips = std::move(skips);
  net.heads = std::move(heads);
  validate_network(net);
  return net;
}

Matrix apply_head_activation(HeadActivation act, const Matrix& slice) {
  switch (act) {
    case HeadActivation::kIdentity:
      return slice;
    case HeadActivation::kSigmoid:
      return apply(Activation::sigmoid(), slice);
    case HeadActivation::kSoftmax: {
      Matrix out(slice.rows(), slice.cols());
      for (std::size_t i = 0; i < slice.rows(); ++i) {
        double mx = slice(i, 0);
        for (std::size_t j = 1; j < slice.cols(); ++j)
          mx = std::max(mx, slice(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < slice.cols(); ++j) {
          out(i, j) = std::exp(slice(i, j) - mx);
          sum += out(i, j);
        }
        for (std::size_t j = 0; j < slice.cols(); ++j) out(i, j) /= sum;
      }
      return out;
    }
  }
  return slice;
}

std::vector<LayerTrace> network_forward_trace(const NetworkSpec& net,
                                              const Matrix& x) {
  if (x.cols() != net.input_dim)
    throw std::invalid_argument("network_forward: input width != network input dim");
  std::vector<LayerTrace> trace(net.layers.size());
  Matrix current = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    LayerTrace& t = trace[i];
    t.input = net.has_skip_at(i) ? hcat(x, current) : std::move(current);
    if (const auto* dense = std::get_if<DenseLayer>(&net.layers[i])) {
      t.pre = matmul_nt(t.input, dense->w);
      add_bias_rows(t.pre, dense->bias);
      t.output = apply(dense->act, t.pre);
    } else if (const auto* mag = std::get_if<MagLayer>(&net.layers[i])) {
      t.pre = matmul_nt(t.input, mag->g);
      t.feat = apply(mag->act, t.pre);
      t.output = matmul_nt(t.feat, mag->w);
      add_bias_rows(t.output, mag->bias);
    } else {
      const auto& fused = std::get<FusedLayer>(net.layers[i]);
      t.output = fused_forward(fused, t.input, &x);
    }
    current = t.output;
  }
  throw_if_not_finite(current, "network_forward");
  return trace;
}

ForwardResult network_forward(const NetworkSpec& net, const Matrix& x) {
  auto trace = network_forward_trace(net, x);
  ForwardResult result;
  result.final_output = trace.back().output;
  for (const auto& h : net.heads) {
    Matrix slice = result.final_output.col_block(h.offset, h.offset + h.width);
    result.heads.emplace(h.name, apply_head_activation(h.act, slice));
  }
  return result;
}

ParamCount param_count(const NetworkSpec& net) {
  ParamCount c;
  for (const auto& layer : net.layers) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      c.trainable += dense->w.size() + dense->bias.size();
    } else if (const auto* mag = std::get_if<MagLayer>(&layer)) {
      c.trainable += mag->w.size() + mag->bias.size();
      c.frozen += mag->g.size();
    } else {
      // Bundled layers are inference artifacts; nothing in them trains.
      const auto& fused = std::get<FusedLayer>(layer);
      c.frozen += fused.w_hat.size() + fused.bias.size() + fused.concat_w.size() +
                  fused.g.size();
    }
  }
  return c;
}

std::uint64_t mac_count(const NetworkSpec& net) {
  std::uint64_t macs = 0;
  for (const auto& layer : net.layers) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      macs += static_cast<std::uint64_t>(dense->w.rows()) * dense->w.cols();
    } else if (const auto* mag = std::get_if<MagLayer>(&layer)) {
      macs += static_cast<std::uint64_t>(mag->g.rows()) * mag->g.cols() +
              static_cast<std::uint64_t>(mag->w.rows()) * mag->w.cols();
    } else {
      const auto& fused = std::get<FusedLayer>(layer);
      macs += static_cast<std::uint64_t>(fused.g.rows()) * fused.g.cols() +
              static_cast<std::uint64_t>(fused.w_hat.rows()) * fused.w_hat.cols() +
              static_cast<std::uint64_t>(fused.concat_w.rows()) *
                  fused.concat_w.cols();
    }
  }
  return macs;
}

}  // namespace mag
