// Toy implicit-representation tasks: coordinate grids, sinusoidal positional
// encoding, a procedural RGB target image, an analytic 2-D signed distance
// field, the network shapes for the baseline and MAG variants, and metrics.
#pragma once

#include "mag/layers.hpp"

namespace mag {

// Pixel/cell center coordinates of a size x size grid over [-1, 1]^2, row-major.
Matrix grid_coords(std::size_t size);

// Sinusoidal features sin(2^k pi x), cos(2^k pi x) per axis, k = 0, 1, ...,
// interleaved and truncated to out_dim columns.
Matrix positional_encoding(const Matrix& coords, std::size_t out_dim);

// Checkerboard-plus-gradient RGB image in [0,1], one row per grid cell.
Matrix procedural_image(std::size_t size);

// Signed distance to a circle-union-box composite, one row per coordinate.
Matrix composite_sdf(const Matrix& coords);

double psnr(const Matrix& a, const Matrix& b, double cap = 99.0);

struct SdfErrors {
  double l1_avg = 0.0;   // mean |error| over the whole grid
  double l1_surf = 0.0;  // mean |error| where |truth| <= band (zero level set)
};
SdfErrors sdf_errors(const Matrix& predicted, const Matrix& truth, double band);

// Image task shapes: 60-dim encoded input, width 256, skip re-injection of the
// encoding mid-stack, density + RGB heads. The MAG variant carries three MAG
// layers; every one is followed by an affine map so all three bundling sites
// (one across the concatenation split) are exercised.
inline constexpr std::size_t kImageEncodingDim = 60;
inline constexpr std::size_t kImageWidth = 256;
NetworkSpec build_image_baseline(RngStream rng);
NetworkSpec build_image_mag(std::size_t features, RngStream rng);

// SDF task shapes: 40-dim encoded input, width 128, one skip, linear output.
// The MAG variant replaces the last hidden layer; the DR variant shrinks it.
inline constexpr std::size_t kSdfEncodingDim = 40;
inline constexpr std::size_t kSdfWidth = 128;
NetworkSpec build_sdf_baseline(RngStream rng);
NetworkSpec build_sdf_mag(std::size_t features, RngStream rng);
NetworkSpec build_sdf_dr(std::size_t reduced_width, RngStream rng);

// Index of the layer the distillation bench replaces (last hidden layer).
std::size_t image_last_hidden_index();
std::size_t sdf_last_hidden_index();

void write_ppm(const Matrix& rgb_rows, std::size_t size, const std::string& path);

}  // namespace mag
