#include "mag/rng.hpp"

#include <cmath>
#include <numbers>

namespace mag {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RngStream RngStream::substream(std::uint64_t k) const {
  return RngStream{seed, splitmix64(stream ^ splitmix64(k + 0x51'7c'c1'b7'27'22'0a'95ull))};
}

Rng::Rng(RngStream s)
    : engine_(splitmix64(splitmix64(s.seed) ^ splitmix64(s.stream + 1))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() { return 1.0 - uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t n) {
  // Modulo bias is below 2^-40 for every n used here.
  return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
}

}  // namespace mag
