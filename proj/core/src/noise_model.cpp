#include "psycodec/noise_model.hpp"

#include <algorithm>
#include <cmath>

#include "psycodec/dense_oracle.hpp"
#include "psycodec/error.hpp"
#include "psycodec/phase_space.hpp"

namespace psycodec::noise {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.centered();
  return out;
}

std::vector<double> shape_noise(const NoiseSpec& spec, std::size_t n) {
  if (spec.symbol.n_time() == 0) fail(ErrorKind::InvalidArgument, "shape_noise: empty symbol");
  if (!(spec.variance_scale > 0.0) || !std::isfinite(spec.variance_scale))
    fail(ErrorKind::InvalidArgument, "shape_noise: variance_scale must be positive");
  if (spec.symbol.min() < 0.0 || !spec.symbol.all_finite())
    fail(ErrorKind::Numerical, "shape_noise: noise symbol must be finite and non-negative");
  const PhaseSymbol floored = spec.symbol.floored();
  if (!(floored.min() > 0.0)) fail(ErrorKind::Numerical, "shape_noise: floor failure");

  std::vector<double> x = white_noise(n, spec.seed);
  if (spec.variance_scale != 1.0 / 12.0) {
    const double g = std::sqrt(spec.variance_scale * 12.0);
    for (auto& v : x) v *= g;
  }
  const auto root = phase_space::symbol_function(floored, phase_space::ScalarFunction::sqrt(), 0);
  if (root.grid().layout == FreqLayout::FullCircle) {
    if (root.n_time() != n) fail(ErrorKind::InvalidArgument, "shape_noise: dense grid size mismatch");
    return oracle::inverse_weyl(root).apply(x);
  }
  return phase_space::apply_symbol(root, x);
}

PhaseSymbol estimate_noise_symbol(std::span<const std::vector<double>> realizations,
                                  const TFGrid& grid, const EstimateOptions& opts) {
  const std::size_t r = realizations.size();
  if (r < kMinRealizations) fail(ErrorKind::InvalidArgument, "underpowered estimate");
  const std::size_t n = realizations.front().size();
  for (const auto& y : realizations)
    if (y.size() != n) fail(ErrorKind::InvalidArgument, "realizations differ in length");
  grid.validate();

  std::vector<double> mean;
  if (opts.remove_mean) {
    mean.assign(n, 0.0);
    for (const auto& y : realizations)
      for (std::size_t i = 0; i < n; ++i) mean[i] += y[i];
    for (auto& v : mean) v /= static_cast<double>(r);
  }
  const double norm = opts.remove_mean ? 1.0 / static_cast<double>(r - 1)
                                       : 1.0 / static_cast<double>(r);
  std::vector<double> y(n);
  auto centered = [&](const std::vector<double>& src) -> std::span<const double> {
    if (!opts.remove_mean) return src;
    for (std::size_t i = 0; i < n; ++i) y[i] = src[i] - mean[i];
    return y;
  };

  if (grid.layout == FreqLayout::FullCircle) {
    if (grid.n_time != n || grid.n_freq != n)
      fail(ErrorKind::InvalidArgument, "dense grid does not match realization length");
    std::vector<double> corr(n * n, 0.0);
    for (const auto& src : realizations) {
      const auto v = centered(src);
      for (std::size_t a = 0; a < n; ++a) {
        const double va = v[a];
        double* row = corr.data() + a * n;
        for (std::size_t b = 0; b < n; ++b) row[b] += va * v[b];
      }
    }
    oracle::DenseOperator op(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) op(a, b) = corr[a * n + b] * norm;
    return oracle::weyl_symbol(op);
  }

  PhaseSymbol acc(grid);
  for (const auto& src : realizations) {
    const auto c = phase_space::coherent_state(centered(src), grid);
    auto dst = acc.values();
    const auto s = c.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s[i];
  }
  for (auto& v : acc.values()) v *= norm;
  return acc;
}

}  // namespace psycodec::noise
