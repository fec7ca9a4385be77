#include "mag/fusion.hpp"

namespace mag {

namespace {

std::vector<double> fold_bias(const Matrix& w, const std::vector<double>& inner,
                              const std::vector<double>& outer) {
  std::vector<double> out(w.rows(), 0.0);
  if (!inner.empty()) {
    if (inner.size() != w.cols())
      throw std::invalid_argument("bundle: bias length mismatch");
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) out[i] += w(i, j) * inner[j];
  }
  if (!outer.empty())
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += outer[i];
  return out;
}

std::uint64_t fused_macs(const FusedLayer& f) {
  return static_cast<std::uint64_t>(f.g.rows()) * f.g.cols() +
         static_cast<std::uint64_t>(f.w_hat.rows()) * f.w_hat.cols() +
         static_cast<std::uint64_t>(f.concat_w.rows()) * f.concat_w.cols();
}

std::uint64_t mag_macs(const MagLayer& m) {
  return static_cast<std::uint64_t>(m.g.rows()) * m.g.cols() +
         static_cast<std::uint64_t>(m.w.rows()) * m.w.cols();
}

std::uint64_t dense_macs(const DenseLayer& d) {
  return static_cast<std::uint64_t>(d.w.rows()) * d.w.cols();
}

// Fold one more affine map into an existing fused layer. split_dim > 0 means
// the dense consumed [original_input | fused_output].
FusedLayer fold_dense(const FusedLayer& fused, const DenseLayer& next,
                      std::size_t split_dim) {
  Matrix w_side, w_main;
  if (split_dim > 0) {
    w_side = next.w.col_block(0, split_dim);
    w_main = next.w.col_block(split_dim, next.w.cols());
  } else {
    w_main = next.w;
  }
  if (w_main.cols() != fused.out_dim())
    throw std::invalid_argument("fuse: dense input does not match fused output");

  FusedLayer out = fused;
  out.w_hat = matmul(w_main, fused.w_hat);
  out.bias = fold_bias(w_main, fused.bias, next.bias);
  out.output_act = next.act;
  if (!fused.concat_w.empty() && split_dim > 0) {
    Matrix carried = matmul(w_main, fused.concat_w);
    for (std::size_t i = 0; i < carried.size(); ++i)
      w_side.storage()[i] += carried.storage()[i];
    out.concat_w = std::move(w_side);
  } else if (!fused.concat_w.empty()) {
    out.concat_w = matmul(w_main, fused.concat_w);
  } else if (split_dim > 0) {
    out.concat_w = std::move(w_side);
  }
  return out;
}

}  // namespace

FusedLayer bundle(const MagLayer& mag, const DenseLayer& next) {
  if (next.in_dim() != mag.out_dim())
    throw std::invalid_argument("bundle: next.in_dim != mag.out_dim");
  FusedLayer fused;
  fused.w_hat = matmul(next.w, mag.w);
  fused.bias = fold_bias(next.w, mag.bias, next.bias);
  fused.g = mag.g;
  fused.feature_act = mag.act;
  fused.output_act = next.act;
  fused.ensemble = mag.ensemble;
  fused.g_stream = mag.g_stream;
  return fused;
}

ConcatBundle bundle_with_concat(const MagLayer& mag, const DenseLayer& next,
                                std::size_t concat_dim, std::size_t mag_out_dim) {
  if (mag_out_dim != mag.out_dim())
    throw std::invalid_argument("bundle_with_concat: mag_out_dim mismatch");
  if (next.in_dim() != concat_dim + mag.out_dim())
    throw std::invalid_argument(
        "bundle_with_concat: next.in_dim != concat_dim + mag.out_dim");
  if (concat_dim == 0) return ConcatBundle{bundle(mag, next), Matrix()};

  DenseLayer main_part;
  main_part.w = next.w.col_block(concat_dim, next.w.cols());
  main_part.bias = next.bias;
  main_part.act = next.act;
  ConcatBundle result;
  result.w_concat = next.w.col_block(0, concat_dim);
  result.fused = bundle(mag, main_part);
  result.fused.concat_w = result.w_concat;
  return result;
}

NetworkSpec fuse_network(const NetworkSpec& net) {
  validate_network(net);
  NetworkSpec out;
  out.name = net.name;
  out.input_dim = net.input_dim;
  out.heads = net.heads;

  std::vector<std::size_t> new_index(net.layers.size());
  std::vector<bool> consumed(net.layers.size(), false);

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    new_index[i] = out.layers.size();
    const auto* mag = std::get_if<MagLayer>(&net.layers[i]);
    if (mag == nullptr) {
      out.layers.push_back(net.layers[i]);
      continue;
    }

    // Greedy fold: collapse following affine maps while each step strictly
    // lowers the multiply-accumulate count; any nonlinearity ends the chain.
    FusedLayer current;
    bool have_fused = false;
    std::uint64_t running_macs = mag_macs(*mag);
    std::size_t j = i;
    while (j + 1 < net.layers.size()) {
      const auto* next = std::get_if<DenseLayer>(&net.layers[j + 1]);
      if (next == nullptr) break;
      if (have_fused && current.output_act.kind != ActKind::kIdentity) break;
      const std::size_t split =
          net.has_skip_at(j + 1) ? net.input_dim : 0;
      FusedLayer candidate =
          have_fused
              ? fold_dense(current, *next, split)
              : (split > 0
                     ? bundle_with_concat(*mag, *next, split, mag->out_dim()).fused
                     : bundle(*mag, *next));
      if (fused_macs(candidate) >= running_macs + dense_macs(*next)) break;
      current = std::move(candidate);
      have_fused = true;
      running_macs = fused_macs(current);
      consumed[j + 1] = true;
      ++j;
    }

    if (have_fused) {
      out.layers.emplace_back(std::move(current));
      i = j;
    } else {
      out.layers.push_back(net.layers[i]);
    }
  }

  for (const auto& s : net.skips) {
    if (consumed.size() > s.at_layer && consumed[s.at_layer]) continue;
    out.skips.push_back(SkipConcat{new_index[s.at_layer]});
  }
  validate_network(out);
  return out;
}

std::size_t count_fused_layers(const NetworkSpec& net) {
  std::size_t n = 0;
  for (const auto& layer : net.layers)
    if (std::holds_alternative<FusedLayer>(layer)) ++n;
  return n;
}

}  // namespace mag
