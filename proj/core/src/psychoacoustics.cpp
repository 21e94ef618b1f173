#include "psycodec/psychoacoustics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psycodec/error.hpp"
#include "psycodec/noise_model.hpp"
#include "psycodec/phase_space.hpp"

namespace psycodec::psycho {

double MaskingParams::planck_product() const noexcept {
  return 2.0 * std::numbers::pi * a_t * a_f;
}

void MaskingParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(a_t > 0.0) || !std::isfinite(a_t)) fail(ErrorKind::InvalidArgument, "a_t must be positive");
  if (!(a_f > 0.0) || !std::isfinite(a_f)) fail(ErrorKind::InvalidArgument, "a_f must be positive");
  if (!(window_a > 0.0) || !std::isfinite(window_a))
    fail(ErrorKind::InvalidArgument, "window_a must be positive");
  if (std::isnan(ath_offset_db) || ath_offset_db == -std::numeric_limits<double>::infinity())
    fail(ErrorKind::InvalidArgument, "ath_offset_db must be finite or +inf");
}

double terhardt_db(double hz) {
  const double k = std::max(hz, 20.0) / 1000.0;
  return 3.64 * std::pow(k, -0.8) - 6.5 * std::exp(-0.6 * (k - 3.3) * (k - 3.3)) +
         1e-3 * k * k * k * k;
}

PhaseSymbol hearing_threshold(const TFGrid& grid, double ath_offset_db) {
  grid.validate();
  PhaseSymbol h(grid);
  if (ath_offset_db == MaskingParams::kAthDisabled) return h;
  std::vector<double> profile(grid.n_freq);
  for (std::size_t k = 0; k < grid.n_freq; ++k) {
    const std::size_t kk =
        grid.layout == FreqLayout::FullCircle ? std::min(k, grid.n_freq - k) : k;
    const double hz = grid.freq_of(kk) * (grid.layout == FreqLayout::FullCircle ? grid.sample_rate : 1.0);
    profile[k] = std::pow(10.0, (terhardt_db(hz) + ath_offset_db) / 10.0);
  }
  for (std::size_t j = 0; j < grid.n_time; ++j) std::ranges::copy(profile, h.column(j).begin());
  return h;
}

MaskingModel build_masking(std::span<const double> signal, double sample_rate,
                           const MaskingParams& params) {
  params.validate();
  const TFGrid grid = TFGrid::for_signal(sample_rate, signal.size(), params.window_a);
  MaskingModel m;
  m.params = params;
  m.C = phase_space::coherent_state(signal, grid);
  m.S = phase_space::sech_smooth(m.C, params.a_t, params.a_f).floored(kFloor);
  m.M = m.S;
  const double a2 = params.alpha * params.alpha;
  for (auto& v : m.M.values()) v *= a2;
  m.H = hearing_threshold(grid, params.ath_offset_db);
  return m;
}

Stimulus stimulus(std::span<const double> signal, const MaskingModel& model, double alpha_test,
                  std::uint64_t seed) {
  if (!(alpha_test >= 0.0) || !std::isfinite(alpha_test))
    fail(ErrorKind::InvalidArgument, "alpha_test must be finite and non-negative");
  Stimulus out;
  out.samples.assign(signal.begin(), signal.end());
  if (alpha_test > 0.0) {
    const auto noise = noise::shape_noise({model.S, seed, 1.0 / 12.0}, signal.size());
    for (std::size_t i = 0; i < noise.size(); ++i) out.samples[i] += alpha_test * noise[i];
  }
  double peak = 0.0;
  for (double v : out.samples) {
    if (!std::isfinite(v)) fail(ErrorKind::Numerical, "stimulus is not finite");
    peak = std::max(peak, std::abs(v));
  }
  if (peak > kPcmFullScale) {
    out.headroom_gain = kPcmFullScale / peak;
    for (auto& v : out.samples) v *= out.headroom_gain;
  }
  return out;
}

}  // namespace psycodec::psycho
