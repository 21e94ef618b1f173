#include "psycodec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"

namespace psycodec {

TFGrid TFGrid::for_signal(double sample_rate, std::size_t n_samples, double window_a,
                          std::size_t hop) {
  if (!(sample_rate > 0.0)) fail(ErrorKind::InvalidArgument, "sample rate must be positive");
  if (!(window_a > 0.0)) fail(ErrorKind::InvalidArgument, "window width must be positive");
  TFGrid g;
  g.sample_rate = sample_rate;
  g.window_width_a = window_a;
  g.hop = hop != 0 ? hop
                   : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                  std::lround(0.5 * window_a * sample_rate)));
  const auto support = static_cast<std::size_t>(std::ceil(8.0 * window_a * sample_rate)) + 1;
  const std::size_t nfft = std::max<std::size_t>(4, next_pow2(support));
  g.n_freq = nfft / 2 + 1;
  g.freq_step = sample_rate / static_cast<double>(nfft);
  const std::size_t last = n_samples > 0 ? n_samples - 1 : 0;
  g.n_time = (last + g.hop - 1) / g.hop + 1;
  g.layout = FreqLayout::OneSided;
  return g;
}

TFGrid TFGrid::dense(std::size_t n) {
  TFGrid g;
  g.sample_rate = 1.0;
  g.hop = 1;
  g.n_time = n;
  g.n_freq = n;
  g.freq_step = 1.0 / static_cast<double>(n);
  g.window_width_a = 0.0;
  g.layout = FreqLayout::FullCircle;
  return g;
}

void TFGrid::validate() const {
  if (!(sample_rate > 0.0)) fail(ErrorKind::InvalidArgument, "grid: sample rate must be positive");
  if (hop < 1) fail(ErrorKind::InvalidArgument, "grid: hop must be >= 1");
  if (n_freq < 2) fail(ErrorKind::InvalidArgument, "grid: n_freq must be >= 2");
  if (n_time < 1) fail(ErrorKind::InvalidArgument, "grid: n_time must be >= 1");
  const double span = layout == FreqLayout::OneSided
                          ? freq_step * static_cast<double>(n_freq - 1)
                          : freq_step * static_cast<double>(n_freq);
  const double want = layout == FreqLayout::OneSided ? nyquist() : sample_rate;
  if (std::abs(span - want) > 1e-9 * want)
    fail(ErrorKind::InvalidArgument, "grid: frequency axis does not span the band");
}

PhaseSymbol::PhaseSymbol(const TFGrid& grid, double fill)
    : grid_(grid), values_(grid.cells(), fill) {}

PhaseSymbol::PhaseSymbol(const TFGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells())
    fail(ErrorKind::InvalidArgument, "symbol: value count " + std::to_string(values_.size()) +
                                         " does not match grid " + std::to_string(grid_.cells()));
}

double PhaseSymbol::max() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double PhaseSymbol::min() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

bool PhaseSymbol::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double PhaseSymbol::integral() const {
  double total = 0.0;
  for (std::size_t j = 0; j < grid_.n_time; ++j) {
    const auto col = column(j);
    for (std::size_t k = 0; k < grid_.n_freq; ++k) total += grid_.freq_weight(k) * col[k];
  }
  return total * grid_.cell_area();
}

PhaseSymbol PhaseSymbol::floored(double rel_eps) const {
  const double top = max();
  const double floor = top > 0.0 ? rel_eps * top : rel_eps;
  PhaseSymbol out = *this;
  for (double& v : out.values_) v = std::max(v, floor);
  return out;
}

}  // namespace psycodec
