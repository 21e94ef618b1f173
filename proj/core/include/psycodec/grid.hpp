#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psycodec {

/// How the frequency axis of a grid is laid out.
///  - OneSided: bins 0..Nyquist of a real signal, bin k at k * freq_step.
///  - FullCircle: n_freq bins covering [0, sample_rate), used by the dense
///    oracle where every row of phase space is stored explicitly.
enum class FreqLayout { OneSided, FullCircle };

/// Discretization of the time-frequency plane shared by every symbol of one
/// coding run. Column j sits at sample j * hop; row k at k * freq_step Hz.
struct TFGrid {
  double sample_rate = 0.0;
  std::size_t hop = 1;
  std::size_t n_time = 0;
  std::size_t n_freq = 0;
  double freq_step = 0.0;
  double window_width_a = 0.0;  // seconds
  FreqLayout layout = FreqLayout::OneSided;

  /// Grid for a signal of `n_samples` at `sample_rate` with coherent-state
  /// window width `window_a` seconds. hop defaults to a * fs / 2; the
  /// frequency axis is the rfft of the smallest power of two holding the
  /// +-4a window support.
  static TFGrid for_signal(double sample_rate, std::size_t n_samples, double window_a,
                           std::size_t hop = 0);

  /// Periodic n x n grid of the dense oracle: unit sample rate, hop 1,
  /// frequencies k / n cycles per sample.
  static TFGrid dense(std::size_t n);

  std::size_t cells() const noexcept { return n_time * n_freq; }
  std::size_t fft_size() const noexcept {
    return layout == FreqLayout::OneSided ? 2 * (n_freq - 1) : n_freq;
  }
  double time_step() const noexcept { return static_cast<double>(hop) / sample_rate; }
  double time_of(std::size_t j) const noexcept { return static_cast<double>(j) * time_step(); }
  double freq_of(std::size_t k) const noexcept { return static_cast<double>(k) * freq_step; }
  double nyquist() const noexcept { return 0.5 * sample_rate; }

  /// Phase-space area of one cell in units of the Planck cell
  /// (samples x cycles/sample).
  double cell_area() const noexcept {
    return static_cast<double>(hop) * freq_step / sample_rate;
  }
  /// Multiplicity of row k when summing over the full (two-sided) plane.
  double freq_weight(std::size_t k) const noexcept {
    if (layout == FreqLayout::FullCircle) return 1.0;
    return (k == 0 || k + 1 == n_freq) ? 1.0 : 2.0;
  }

  /// Throws psycodec::Error when an invariant is violated.
  void validate() const;

  bool operator==(const TFGrid&) const = default;
};

/// Real function sampled on a TFGrid, stored time-major
/// (values[j * n_freq + k]).
class PhaseSymbol {
 public:
  PhaseSymbol() = default;
  explicit PhaseSymbol(const TFGrid& grid, double fill = 0.0);
  PhaseSymbol(const TFGrid& grid, std::vector<double> values);

  const TFGrid& grid() const noexcept { return grid_; }
  std::size_t n_time() const noexcept { return grid_.n_time; }
  std::size_t n_freq() const noexcept { return grid_.n_freq; }

  double& at(std::size_t j, std::size_t k) { return values_[j * grid_.n_freq + k]; }
  double at(std::size_t j, std::size_t k) const { return values_[j * grid_.n_freq + k]; }

  std::span<double> column(std::size_t j) {
    return {values_.data() + j * grid_.n_freq, grid_.n_freq};
  }
  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * grid_.n_freq, grid_.n_freq};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const;
  double min() const;
  bool all_finite() const;

  /// Weighted sum over the full plane times cell area: the discrete
  /// phase-space integral.
  double integral() const;

  /// Copy with every value raised to at least `rel_eps * max()`.
  /// A symbol that is identically zero is floored at `rel_eps`.
  PhaseSymbol floored(double rel_eps = 1e-9) const;

 private:
  TFGrid grid_;
  std::vector<double> values_;
};

}  // namespace psycodec
