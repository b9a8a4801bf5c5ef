#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slimegate/calibration.hpp"
#include "slimegate/circuit.hpp"
#include "slimegate/fields.hpp"
#include "slimegate/plasmodium.hpp"
#include "slimegate/scene.hpp"

namespace slimegate {

/// Cells at or above `threshold` inside the dish.
std::vector<std::uint8_t> tube_mask(const Grid& trail, const CellMap& cells, double threshold);

/// Topology-preserving thinning of an 8-connected mask. Cells flagged in
/// `fixed` are never removed.
std::vector<std::uint8_t> thin_mask(std::vector<std::uint8_t> mask, const std::vector<std::uint8_t>& fixed, int width,
                                    int height);

/// Skeleton graph of the thresholded trail: one node per electrode, one per
/// junction or tube end, and one edge per tube segment.
ConductiveNetwork extract_network(const Grid& trail, const Scene& scene, double threshold,
                                  const Calibration& calibration);
ConductiveNetwork extract_network(const PlasmodiumState& state, const Scene& scene, double threshold,
                                  const Calibration& calibration);

/// Fast check used while stepping: does the thresholded trail 8-connect the
/// two electrode footprints?
bool trail_connects(const TrailGrid& trail, const CellMap& cells, const Scene& scene, double threshold,
                    const std::string& from, const std::string& to);

}  // namespace slimegate
