#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"

namespace psycodec::codec {

/// Adaptive-grid, piecewise-bilinear, one-byte-per-knot stored key.
///
/// Time knots are grid columns; each carries its own frequency step, with
/// knots at 0, d, 2d, ... and always the last bin. Knot values are
/// log-quantized to a byte over [log_min, log_max].
struct KeyCodebook {
  std::uint32_t n_time = 0;
  std::uint32_t n_freq = 0;
  std::uint32_t hop = 0;
  std::vector<std::uint32_t> time_knots;   // ascending, first 0, last n_time - 1
  std::vector<std::uint32_t> freq_steps;   // one per time knot
  std::vector<std::uint8_t> knot_values;   // slices concatenated in time order
  double log_min = 0.0;
  double log_max = 0.0;

  std::size_t knot_count() const noexcept { return knot_values.size(); }
  double decode_value(std::uint8_t q) const;

  bool operator==(const KeyCodebook&) const = default;
};

/// Number of knots in a slice of `n_freq` bins with step `step`.
std::size_t slice_knots(std::size_t n_freq, std::size_t step);

struct PackStats {
  double max_fractional_error = 0.0;
  double quantization_error = 0.0;  // worst-case from byte rounding alone
};

/// Greedy adaptive grid: each time step as large as possible, then per
/// selected time the largest frequency step, so the reconstructed key is
/// within `frac_tol` of `key` at every cell. Throws on non-positive keys.
KeyCodebook pack_key(const PhaseSymbol& key, double frac_tol = 0.10, PackStats* stats = nullptr);

/// Bit-deterministic reconstruction on `grid` (dimensions must match).
PhaseSymbol unpack_key(const KeyCodebook& book, const TFGrid& grid);

/// Compact byte form (zlib-deflated) and its inverse.
std::vector<std::uint8_t> serialize_key(const KeyCodebook& book);
KeyCodebook deserialize_key(std::span<const std::uint8_t> bytes);

}  // namespace psycodec::codec
