// Artifact serialization: bit-stable CSV tables and the leaf SVG dump.
#pragma once

#include <string>

#include "upress/analysis.hpp"
#include "upress/leaf.hpp"
#include "upress/pressure.hpp"

namespace upress {

/// Shortest round-trip decimal form (17 significant digits), '.' decimal.
std::string format_g17(double v);

/// Grid CSV: one leading metadata comment, a header row, then one row per
/// (base_index, eps, n, offset) cell; '\n' line endings.
std::string grid_csv(const PressureEstimate& est, const std::string& config_hash,
                     const std::string& version);

/// Probe CSV with columns (t, P_value, spread).
std::string derivative_csv(const DerivativeProbe& probe, const std::string& config_hash,
                           const std::string& version);

/// Traced leaf as an SVG polyline in the unit square (split at wrap jumps).
std::string leaf_svg(const LeafSegment& leaf);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace upress
