#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"

namespace psycodec::psycho {

struct MaskingParams {
  double alpha = 0.1;
  double a_t = 0.02;         // seconds
  double a_f = 100.0;        // Hz
  double window_a = 0.01;    // seconds
  /// Hearing-threshold offset in dB; +infinity disables H.
  double ath_offset_db = 0.0;

  static constexpr double kAthDisabled = std::numeric_limits<double>::infinity();

  bool ath_enabled() const noexcept { return ath_offset_db != kAthDisabled; }
  double planck_product() const noexcept;
  /// True when 2 pi a_t a_f < 10, where symbol-calculus truncations degrade.
  bool planck_warning() const noexcept { return planck_product() < 10.0; }
  void validate() const;
};

struct MaskingModel {
  PhaseSymbol C;  // coherent-state representation of the signal
  PhaseSymbol S;  // sech-smoothed, floored
  PhaseSymbol M;  // alpha^2 S
  PhaseSymbol H;  // absolute threshold (zero when disabled)
  MaskingParams params;

  const TFGrid& grid() const noexcept { return S.grid(); }
};

/// Relative floor applied to S before it is used under negative powers.
inline constexpr double kFloor = 1e-9;

MaskingModel build_masking(std::span<const double> signal, double sample_rate,
                           const MaskingParams& params);

/// Terhardt's absolute threshold of hearing in dB SPL at `hz` (clamped to >= 20 Hz).
double terhardt_db(double hz);

/// Time-independent threshold symbol, 10^((T(f) + offset)/10) on the
/// unit-variance convention where 0 dB is the 16-bit rounding-noise floor.
PhaseSymbol hearing_threshold(const TFGrid& grid, double ath_offset_db);

struct Stimulus {
  std::vector<double> samples;
  /// Gain applied to keep the result inside the 16-bit range (1 if none).
  double headroom_gain = 1.0;
};

inline constexpr double kPcmFullScale = 32767.0;

/// psi + alpha_test * s^-1(S^{1/2}) x with x uniform white noise from `seed`.
Stimulus stimulus(std::span<const double> signal, const MaskingModel& model, double alpha_test,
                  std::uint64_t seed);

}  // namespace psycodec::psycho
