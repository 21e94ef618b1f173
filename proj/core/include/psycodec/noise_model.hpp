#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"

namespace psycodec::noise {

/// The stream/stimulus generator: std::mt19937_64, whose output sequence is
/// fixed by the C++ standard. Uniform variates are formed from the top 53
/// bits so they are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (-1/2, 1/2) up to the 2^-53 lattice.
  double centered() { return unit() - 0.5; }

 private:
  std::mt19937_64 engine_;
};

/// n i.i.d. uniform(-1/2, 1/2) samples (variance 1/12).
std::vector<double> white_noise(std::size_t n, std::uint64_t seed);

struct NoiseSpec {
  PhaseSymbol symbol;  // target noise operator symbol N
  std::uint64_t seed = 0;
  double variance_scale = 1.0 / 12.0;
};

/// s^-1(N^{1/2}) X for uniform white X rescaled to `variance_scale`.
/// The two-point symbol of the output is about N * variance_scale.
std::vector<double> shape_noise(const NoiseSpec& spec, std::size_t n);

struct EstimateOptions {
  /// Subtract the ensemble mean first (covariance instead of raw second moment).
  bool remove_mean = false;
};

/// Weyl symbol of E(Y(t1) Y(t2)^*) from realizations. On a dense grid the
/// correlation matrix is formed explicitly and transformed exactly; on a
/// physical grid the ensemble-averaged Gaussian-window spectrogram is used.
PhaseSymbol estimate_noise_symbol(std::span<const std::vector<double>> realizations,
                                  const TFGrid& grid, const EstimateOptions& opts = {});

inline constexpr std::size_t kMinRealizations = 100;

}  // namespace psycodec::noise
