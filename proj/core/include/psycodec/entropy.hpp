#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"
#include "psycodec/psychoacoustics.hpp"

namespace psycodec::codec {

/// log2(2 sqrt 3): entropy offset of a uniform density with unit deviation.
inline constexpr double kUniformOffset = 1.7924812503605780;
/// log2(sqrt(e pi)): the same for a gaussian density.
inline constexpr double kGaussianOffset = 1.5470955851806412;

double uniform_entropy(double sigma);
double gaussian_entropy(double sigma);

struct PerceptualEntropy {
  double window_s = 0.0;            // time-averaging window
  std::vector<double> sigma2;       // per grid column
  std::vector<double> bits_uniform; // per column, clamped at 0
  std::vector<double> bits_gauss;
  double mean_sigma2 = 0.0;
  double mean_uniform = 0.0;
  double mean_gauss = 0.0;
  /// Bits/sample from the signal-wide sigma: uniform_entropy(sqrt(mean_sigma2)).
  double global_uniform = 0.0;
  double global_gauss = 0.0;
};

/// sigma^2(t) = time-windowed phase-space average of lock^2 * C; with the
/// pure-inverse lock that is M^{-1} C. `lock` defaults to M^{-1/2}.
PerceptualEntropy perceptual_entropy(const psycho::MaskingModel& model,
                                     const PhaseSymbol* lock = nullptr,
                                     double window_s = 0.0);

/// Predicted mean(psi_encoded^2): normalized phase-space integral of lock^2 C.
double predicted_encoded_power(const psycho::MaskingModel& model, const PhaseSymbol* lock = nullptr);

struct NoiseEntropy {
  double symbol_bits = 0.0;
  std::optional<double> exact_bits;  // log2 det via the dense oracle
};

/// Phase-space integral of log2 M. When M lives on a dense grid, or the
/// signal is at most `exact_limit` samples long, the exact log2 det is
/// reported too.
NoiseEntropy noise_entropy(const PhaseSymbol& m, std::size_t exact_limit = 0);
NoiseEntropy noise_entropy(const psycho::MaskingModel& model, std::size_t exact_limit = 0);

/// First-order (histogram) entropy in bits per symbol.
double histogram_entropy(std::span<const std::int32_t> values);
double histogram_entropy(const std::vector<std::vector<std::int32_t>>& chunks);

}  // namespace psycodec::codec
