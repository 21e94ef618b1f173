#include "psycodec/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "psycodec/dense_oracle.hpp"
#include "psycodec/error.hpp"

namespace psycodec::codec {

namespace {

// sum_k weight * lock^2 * C / nfft: mean power per sample carried by column j.
std::vector<double> column_power(const psycho::MaskingModel& model, const PhaseSymbol* lock) {
  const PhaseSymbol& c = model.C;
  const PhaseSymbol& m = model.M;
  const TFGrid& g = c.grid();
  if (lock && !(lock->grid() == g)) fail(ErrorKind::InvalidArgument, "lock lives on a different grid");
  if (!(m.min() > 0.0)) fail(ErrorKind::Numerical, "floor failure: M is not strictly positive");
  const double inv_nfft = 1.0 / static_cast<double>(g.fft_size());
  std::vector<double> p(g.n_time, 0.0);
  for (std::size_t j = 0; j < g.n_time; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.n_freq; ++k) {
      const double l2 = lock ? lock->at(j, k) * lock->at(j, k) : 1.0 / m.at(j, k);
      acc += g.freq_weight(k) * l2 * c.at(j, k);
    }
    p[j] = acc * inv_nfft;
  }
  return p;
}

}  // namespace

double uniform_entropy(double sigma) { return std::log2(sigma) + kUniformOffset; }
double gaussian_entropy(double sigma) { return std::log2(sigma) + kGaussianOffset; }

PerceptualEntropy perceptual_entropy(const psycho::MaskingModel& model, const PhaseSymbol* lock,
                                     double window_s) {
  const TFGrid& g = model.C.grid();
  PerceptualEntropy pe;
  pe.window_s = window_s > 0.0 ? window_s : std::max(model.params.a_t, 4.0 * g.time_step());
  const auto p = column_power(model, lock);
  const std::size_t n = p.size();
  const auto half = static_cast<std::size_t>(std::llround(0.5 * pe.window_s / g.time_step()));

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + p[j];
  pe.sigma2.resize(n);
  pe.bits_uniform.resize(n);
  pe.bits_gauss.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j > half ? j - half : 0;
    const std::size_t hi = std::min(n - 1, j + half);
    const double s2 = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    pe.sigma2[j] = s2;
    const double sigma = std::sqrt(s2);
    pe.bits_uniform[j] = s2 > 0.0 ? std::max(0.0, uniform_entropy(sigma)) : 0.0;
    pe.bits_gauss[j] = s2 > 0.0 ? std::max(0.0, gaussian_entropy(sigma)) : 0.0;
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    pe.mean_sigma2 += pe.sigma2[j] * inv;
    pe.mean_uniform += pe.bits_uniform[j] * inv;
    pe.mean_gauss += pe.bits_gauss[j] * inv;
  }
  const double sigma = std::sqrt(pe.mean_sigma2);
  pe.global_uniform = sigma > 0.0 ? std::max(0.0, uniform_entropy(sigma)) : 0.0;
  pe.global_gauss = sigma > 0.0 ? std::max(0.0, gaussian_entropy(sigma)) : 0.0;
  return pe;
}

double predicted_encoded_power(const psycho::MaskingModel& model, const PhaseSymbol* lock) {
  const auto p = column_power(model, lock);
  if (p.size() == 1) return p.front();
  // Trapezoid over column centres: the end columns straddle the signal edges.
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    acc += (j == 0 || j + 1 == p.size()) ? 0.5 * p[j] : p[j];
  return acc / static_cast<double>(p.size() - 1);
}

NoiseEntropy noise_entropy(const PhaseSymbol& m, std::size_t exact_limit) {
  const TFGrid& g = m.grid();
  if (!(m.min() > 0.0)) fail(ErrorKind::Numerical, "floor failure: M is not strictly positive");
  NoiseEntropy out;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n_time; ++j)
    for (std::size_t k = 0; k < g.n_freq; ++k) acc += g.freq_weight(k) * std::log2(m.at(j, k));
  out.symbol_bits = acc * g.cell_area();

  auto exact = [](const PhaseSymbol& dense) {
    const auto ev = oracle::eigenvalues(oracle::inverse_weyl(dense));
    double bits = 0.0;
    for (double v : ev) {
      if (!(v > 0.0)) fail(ErrorKind::Numerical, "operator is not positive definite; log det undefined");
      bits += std::log2(v);
    }
    return bits;
  };
  if (g.layout == FreqLayout::FullCircle) {
    if (g.n_time == g.n_freq && g.n_time <= oracle::kMaxDimension) out.exact_bits = exact(m);
  } else {
    std::size_t n = (g.n_time - 1) * g.hop + 1;
    n -= n % 2;
    if (n >= 2 && n <= exact_limit && n <= oracle::kMaxDimension)
      out.exact_bits = exact(oracle::to_dense(m, n));
  }
  return out;
}

NoiseEntropy noise_entropy(const psycho::MaskingModel& model, std::size_t exact_limit) {
  return noise_entropy(model.M, exact_limit);
}

double histogram_entropy(std::span<const std::int32_t> values) {
  if (values.empty()) return 0.0;
  std::unordered_map<std::int32_t, std::size_t> counts;
  for (auto v : values) ++counts[v];
  const double n = static_cast<double>(values.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double histogram_entropy(const std::vector<std::vector<std::int32_t>>& chunks) {
  std::vector<std::int32_t> all;
  for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return histogram_entropy(all);
}

}  // namespace psycodec::codec
