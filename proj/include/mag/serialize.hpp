// Versioned binary containers for networks and capture datasets. Layout is
// documented in the README; doubles are stored raw little-endian.
#pragma once

#include "mag/distill.hpp"
#include "mag/layers.hpp"

#include <string>

namespace mag {

void save_network(const NetworkSpec& net, const std::string& path);
NetworkSpec load_network(const std::string& path);

// Regenerates every frozen feature matrix from its recorded stream and
// compares bit-for-bit against the stored values.
bool verify_frozen_features(const NetworkSpec& net);

void save_capture(const CaptureDataset& ds, const std::string& path);
CaptureDataset load_capture(const std::string& path);

}  // namespace mag
