// Bundling: collapsing a MAG layer with subsequent affine maps into a single
// effective layer, including the column-split rule for skip-concatenation.
#pragma once

#include "mag/layers.hpp"

namespace mag {

// W_hat = next.w * mag.w; next's activation is applied after the fused affine
// map. next.in_dim must equal mag.out_dim.
FusedLayer bundle(const MagLayer& mag, const DenseLayer& next);

struct ConcatBundle {
  FusedLayer fused;  // concat path installed as fused.concat_w
  Matrix w_concat;   // the out x concat_dim column slice of next.w
};

// next consumed [concat | mag output]; next.w is split column-wise at
// concat_dim and only the mag-facing part is folded into W_hat.
ConcatBundle bundle_with_concat(const MagLayer& mag, const DenseLayer& next,
                                std::size_t concat_dim, std::size_t mag_out_dim);

// Rewrites every MAG -> affine adjacency (affine chains fold until a
// nonlinearity; concatenation handled by the split rule) when the rewrite
// strictly lowers the multiply-accumulate count. Behavior-preserving and
// idempotent. No-op when nothing qualifies.
NetworkSpec fuse_network(const NetworkSpec& net);

// Number of bundled layers a fuse pass produced.
std::size_t count_fused_layers(const NetworkSpec& net);

}  // namespace mag
