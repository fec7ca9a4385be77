// Deterministic RNG streams. A (seed, stream) pair fully determines the draw
// sequence, independent of platform and thread schedule; substreams give
// independent parallel replicates.
#pragma once

#include <cstdint>
#include <random>

namespace mag {

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Independent child stream; mixing is injective enough for experiment use.
  RngStream substream(std::uint64_t k) const;

  bool operator==(const RngStream&) const = default;
};

// Stateful sampler over one stream. mt19937_64 is fully specified by the
// standard and Box-Muller is ours, so sequences are bit-identical everywhere.
class Rng {
 public:
  explicit Rng(RngStream s);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1].
  double uniform_open();
  // Standard normal via Box-Muller, spare value cached.
  double normal();
  // Uniform index in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mag
