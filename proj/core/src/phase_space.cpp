#include "psycodec/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"

namespace psycodec::phase_space {

namespace {

constexpr double kPi = std::numbers::pi;

// Half-sample symmetric reflection of index i into [0, n).
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

std::vector<double> gaussian_window(double a_samples, std::size_t& half) {
  half = static_cast<std::size_t>(std::floor(4.0 * a_samples));
  std::vector<double> w(2 * half + 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(half);
    w[i] = std::exp(-d * d / (2.0 * a_samples * a_samples));
  }
  return w;
}

// Convolves every length-n line of `data` (stride between elements, lines
// starting at `starts`) with symmetric `taps` under reflection at both ends.
class LineConvolver {
 public:
  LineConvolver(std::span<const double> taps, std::size_t n)
      : radius_(taps.size() / 2), n_(n), fft_(next_pow2(n + 2 * (taps.size() / 2))),
        buffer_(fft_.size()), spec_(fft_.bins()), kernel_(fft_.bins()) {
    std::vector<double> h(fft_.size(), 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i) {
      const auto off = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(radius_);
      h[static_cast<std::size_t>((off + static_cast<std::ptrdiff_t>(fft_.size())) %
                                 static_cast<std::ptrdiff_t>(fft_.size()))] = taps[i];
    }
    fft_.forward(h, kernel_);
    const double scale = 1.0 / static_cast<double>(fft_.size());
    for (auto& c : kernel_) c *= scale;
  }

  void run(double* line, std::size_t stride) {
    const auto r = static_cast<std::ptrdiff_t>(radius_);
    const std::size_t ext = n_ + 2 * radius_;
    for (std::size_t i = 0; i < ext; ++i)
      buffer_[i] = line[reflect(static_cast<std::ptrdiff_t>(i) - r, n_) * stride];
    std::fill(buffer_.begin() + static_cast<std::ptrdiff_t>(ext), buffer_.end(), 0.0);
    fft_.forward(buffer_, spec_);
    for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] *= kernel_[k];
    fft_.inverse(spec_, buffer_);
    // Roundoff can push far tails a hair below zero.
    for (std::size_t i = 0; i < n_; ++i) line[i * stride] = std::max(0.0, buffer_[i + radius_]);
  }

 private:
  std::size_t radius_;
  std::size_t n_;
  RealFft fft_;
  std::vector<double> buffer_;
  std::vector<std::complex<double>> spec_;
  std::vector<std::complex<double>> kernel_;
};

double dt_of(const TFGrid& g) { return g.time_step(); }
double df_of(const TFGrid& g) { return g.freq_step; }

// First and second differences along one axis of length n with spacing h.
// Periodic when `wrap`, otherwise one-sided second-order stencils at edges.
void diff_axis(const double* x, std::size_t stride, std::size_t n, double h, bool wrap,
               double* d1, double* d2) {
  auto at = [&](std::size_t i) { return x[i * stride]; };
  for (std::size_t i = 0; i < n; ++i) {
    double v1, v2;
    if (wrap) {
      const double prev = at((i + n - 1) % n);
      const double next = at((i + 1) % n);
      v1 = (next - prev) / (2.0 * h);
      v2 = (next - 2.0 * at(i) + prev) / (h * h);
    } else if (n < 4) {
      // Too short for second-order stencils; treat as flat.
      v1 = 0.0;
      v2 = 0.0;
    } else if (i == 0) {
      v1 = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      v2 = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
    } else if (i + 1 == n) {
      v1 = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
      v2 = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
    } else {
      v1 = (at(i + 1) - at(i - 1)) / (2.0 * h);
      v2 = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
    }
    if (d1) d1[i * stride] = v1;
    if (d2) d2[i * stride] = v2;
  }
}

void require_same_grid(const PhaseSymbol& a, const PhaseSymbol& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::InvalidArgument, "symbols live on different grids");
}

}  // namespace

PhaseSymbol coherent_state(std::span<const double> signal, const TFGrid& grid) {
  grid.validate();
  if (grid.layout != FreqLayout::OneSided)
    fail(ErrorKind::InvalidArgument, "coherent_state needs a one-sided grid");
  if (signal.size() < grid.hop) fail(ErrorKind::InvalidArgument, "signal too short");
  for (std::size_t i = 0; i < signal.size(); ++i)
    if (!std::isfinite(signal[i]))
      fail(ErrorKind::Numerical, "non-finite sample at index " + std::to_string(i));

  const double a_samples = grid.window_width_a * grid.sample_rate;
  std::size_t half = 0;
  const auto window = gaussian_window(a_samples, half);
  const std::size_t nfft = grid.fft_size();
  if (2 * half + 1 > nfft)
    fail(ErrorKind::InvalidArgument, "grid frequency axis too short for the window support");
  double energy = 0.0;
  for (double w : window) energy += w * w;

  RealFft fft(nfft);
  std::vector<double> frame(nfft);
  std::vector<std::complex<double>> spec(fft.bins());
  PhaseSymbol out(grid);
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const auto h = static_cast<std::ptrdiff_t>(half);
  for (std::size_t j = 0; j < grid.n_time; ++j) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const auto center = static_cast<std::ptrdiff_t>(j * grid.hop);
    for (std::ptrdiff_t i = -h; i <= h; ++i) {
      const std::ptrdiff_t s = center + i;
      if (s < 0 || s >= n) continue;
      // Centering the window at index 0 only changes the phase.
      const auto slot = static_cast<std::size_t>((i + static_cast<std::ptrdiff_t>(nfft)) %
                                                 static_cast<std::ptrdiff_t>(nfft));
      frame[slot] = window[static_cast<std::size_t>(i + h)] * signal[static_cast<std::size_t>(s)];
    }
    fft.forward(frame, spec);
    auto col = out.column(j);
    for (std::size_t k = 0; k < grid.n_freq; ++k) col[k] = std::norm(spec[k]) / energy;
  }
  return out;
}

std::vector<double> sech_taps(double scale, double step) {
  if (!(scale > 0.0) || !(step > 0.0))
    fail(ErrorKind::InvalidArgument, "sech kernel scale and step must be positive");
  if (scale < step) fail(ErrorKind::InvalidArgument, "kernel under-resolved");
  // Tail mass beyond 15 scales is ~ e^{-7.5 pi} ~ 6e-11.
  const auto radius = static_cast<std::size_t>(std::ceil(15.0 * scale / step));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(radius)) * step;
    taps[i] = 1.0 / std::cosh(kPi * x / (2.0 * scale));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

PhaseSymbol sech_smooth(const PhaseSymbol& sym, double a_t, double a_f) {
  const TFGrid& g = sym.grid();
  const auto taps_t = sech_taps(a_t, dt_of(g));
  const auto taps_f = sech_taps(a_f, df_of(g));
  for (double v : sym.values())
    if (!(v >= 0.0)) fail(ErrorKind::InvalidArgument, "sech_smooth needs a nonnegative symbol");

  PhaseSymbol out = sym;
  double* data = out.values().data();
  {
    LineConvolver conv(taps_f, g.n_freq);
    for (std::size_t j = 0; j < g.n_time; ++j) conv.run(data + j * g.n_freq, 1);
  }
  {
    LineConvolver conv(taps_t, g.n_time);
    for (std::size_t k = 0; k < g.n_freq; ++k) conv.run(data + k, g.n_freq);
  }
  return out;
}

Partials partials(const PhaseSymbol& sym) {
  const TFGrid& g = sym.grid();
  const bool wrap = g.layout == FreqLayout::FullCircle;
  Partials p{PhaseSymbol(g), PhaseSymbol(g), PhaseSymbol(g), PhaseSymbol(g), PhaseSymbol(g)};
  const double dt = dt_of(g);
  const double df = df_of(g);
  const double* a = sym.values().data();
  for (std::size_t j = 0; j < g.n_time; ++j) {
    const std::size_t off = j * g.n_freq;
    diff_axis(a + off, 1, g.n_freq, df, wrap, p.f.values().data() + off,
              p.ff.values().data() + off);
  }
  for (std::size_t k = 0; k < g.n_freq; ++k) {
    diff_axis(a + k, g.n_freq, g.n_time, dt, wrap, p.t.values().data() + k,
              p.tt.values().data() + k);
  }
  for (std::size_t j = 0; j < g.n_time; ++j) {
    const std::size_t off = j * g.n_freq;
    diff_axis(p.t.values().data() + off, 1, g.n_freq, df, wrap, p.tf.values().data() + off,
              nullptr);
  }
  return p;
}

bool BVReport::passes() const { return worst() <= 1.0 + tolerance; }

double BVReport::worst() const {
  double w = 0.0;
  for (const auto& row : max_ratio)
    for (double v : row) w = std::max(w, v);
  return w;
}

BVReport bv_check(const PhaseSymbol& sym, double a_t, double a_f, double tolerance) {
  if (!(a_t > 0.0) || !(a_f > 0.0))
    fail(ErrorKind::InvalidArgument, "bv_check scales must be positive");
  for (double v : sym.values())
    if (!(v > 0.0)) fail(ErrorKind::InvalidArgument, "floor required: symbol is not strictly positive");

  const TFGrid& g = sym.grid();
  const bool wrap = g.layout == FreqLayout::FullCircle;
  const auto p = partials(sym);
  BVReport r;
  r.a_t = a_t;
  r.a_f = a_f;
  r.tolerance = tolerance;
  r.planck_product = 2.0 * kPi * a_t * a_f;
  const std::size_t j0 = wrap ? 0 : 1;
  const std::size_t k0 = wrap ? 0 : 1;
  const std::size_t j1 = wrap ? g.n_time : (g.n_time > 1 ? g.n_time - 1 : 0);
  const std::size_t k1 = wrap ? g.n_freq : g.n_freq - 1;
  for (std::size_t j = j0; j < j1; ++j) {
    for (std::size_t k = k0; k < k1; ++k) {
      const double inv = 1.0 / sym.at(j, k);
      auto upd = [&](int n, int m, double d) {
        const double v = std::abs(d * inv) * std::pow(a_t, n) * std::pow(a_f, m);
        r.max_ratio[n][m] = std::max(r.max_ratio[n][m], v);
      };
      upd(1, 0, p.t.at(j, k));
      upd(0, 1, p.f.at(j, k));
      upd(2, 0, p.tt.at(j, k));
      upd(0, 2, p.ff.at(j, k));
      upd(1, 1, p.tf.at(j, k));
    }
  }
  return r;
}

ScalarFunction ScalarFunction::identity() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, [](double x) { return std::isfinite(x); }, "identity"};
}

ScalarFunction ScalarFunction::sqrt() {
  auto f = power(0.5);
  f.in_domain = [](double x) { return x >= 0.0 && std::isfinite(x); };
  f.name = "sqrt";
  return f;
}

ScalarFunction ScalarFunction::inv_sqrt() {
  auto f = power(-0.5);
  f.name = "inv_sqrt";
  return f;
}

ScalarFunction ScalarFunction::inverse() {
  auto f = power(-1.0);
  f.name = "inverse";
  return f;
}

ScalarFunction ScalarFunction::log2() {
  const double l = std::numbers::ln2;
  return {[](double x) { return std::log2(x); }, [l](double x) { return 1.0 / (l * x); },
          [l](double x) { return -1.0 / (l * x * x); },
          [l](double x) { return 2.0 / (l * x * x * x); },
          [](double x) { return x > 0.0 && std::isfinite(x); }, "log2"};
}

ScalarFunction ScalarFunction::power(double p) {
  return {[p](double x) { return std::pow(x, p); },
          [p](double x) { return p * std::pow(x, p - 1.0); },
          [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); },
          [p](double x) { return p * (p - 1.0) * (p - 2.0) * std::pow(x, p - 3.0); },
          [](double x) { return x > 0.0 && std::isfinite(x); }, "power"};
}

PhaseSymbol symbol_function(const PhaseSymbol& sym, const ScalarFunction& func, int order) {
  if (order != 0 && order != 1) fail(ErrorKind::InvalidArgument, "sofoo order must be 0 or 1");
  const TFGrid& g = sym.grid();
  PhaseSymbol out(g);
  for (std::size_t j = 0; j < g.n_time; ++j) {
    for (std::size_t k = 0; k < g.n_freq; ++k) {
      const double v = sym.at(j, k);
      if (!func.in_domain(v))
        fail(ErrorKind::Numerical, std::string("value ") + std::to_string(v) + " at cell (" +
                                       std::to_string(j) + ", " + std::to_string(k) +
                                       ") is outside the domain of " + func.name);
      out.at(j, k) = func.f(v);
    }
  }
  if (order == 0) return out;

  const auto p = partials(sym);
  const double c = 0.25 / (4.0 * kPi * kPi);
  auto vals = out.values();
  const auto a = sym.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double at = p.t.values()[i], af = p.f.values()[i];
    const double att = p.tt.values()[i], aff = p.ff.values()[i], atf = p.tf.values()[i];
    const double second = (func.d2(a[i]) / 2.0) * (att * aff - atf * atf);
    const double third =
        (func.d3(a[i]) / 6.0) * (at * at * aff + af * af * att - 2.0 * at * af * atf);
    vals[i] -= c * (second + third);
  }
  return out;
}

MoyalProduct star_moyal(const PhaseSymbol& a, const PhaseSymbol& b, int order) {
  require_same_grid(a, b);
  if (order < 0 || order > 2) fail(ErrorKind::InvalidArgument, "Moyal order must be 0, 1 or 2");
  const TFGrid& g = a.grid();
  MoyalProduct out{PhaseSymbol(g), PhaseSymbol(g)};
  auto re = out.real.values();
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = a.values()[i] * b.values()[i];
  if (order == 0) return out;

  const auto pa = partials(a);
  const auto pb = partials(b);
  const double janus = 1.0 / (2.0 * kPi);
  auto im = out.imag.values();
  for (std::size_t i = 0; i < im.size(); ++i) {
    const double poisson =
        pa.t.values()[i] * pb.f.values()[i] - pa.f.values()[i] * pb.t.values()[i];
    im[i] = 0.5 * janus * poisson;
  }
  if (order == 1) return out;

  // (i/2)^2 / 2! * A J^2 B
  const double c2 = -0.125 * janus * janus;
  for (std::size_t i = 0; i < re.size(); ++i) {
    const double j2 = pa.tt.values()[i] * pb.ff.values()[i] -
                      2.0 * pa.tf.values()[i] * pb.tf.values()[i] +
                      pa.ff.values()[i] * pb.tt.values()[i];
    re[i] += c2 * j2;
  }
  return out;
}

std::size_t apply_frame_length(const TFGrid& grid, const ApplyOptions& opts) {
  if (opts.frame != 0) {
    if (opts.frame < 8 || opts.frame % 4 != 0)
      fail(ErrorKind::InvalidArgument, "apply frame must be a multiple of 4, at least 8");
    return opts.frame;
  }
  // Power of two nearest 4 * hop in the log sense.
  const double target = 4.0 * static_cast<double>(grid.hop);
  std::size_t frame = 64;
  while (static_cast<double>(frame) * std::numbers::sqrt2 < target) frame <<= 1;
  return frame;
}

std::vector<double> apply_symbol(const PhaseSymbol& sym, std::span<const double> signal,
                                 const ApplyOptions& opts) {
  const TFGrid& g = sym.grid();
  g.validate();
  if (g.layout != FreqLayout::OneSided)
    fail(ErrorKind::InvalidArgument, "apply_symbol needs a one-sided grid");
  const std::size_t n = signal.size();
  if (n == 0) return {};
  if ((g.n_time - 1) * g.hop < n - 1)
    fail(ErrorKind::InvalidArgument,
         "symbol grid covers " + std::to_string((g.n_time - 1) * g.hop + 1) +
             " samples but the signal has " + std::to_string(n));

  const std::size_t frame = apply_frame_length(g, opts);
  const std::size_t fhop = frame / 4;
  const std::size_t bins = frame / 2 + 1;

  // Column multipliers resampled onto frame bins.
  std::vector<double> mult(g.n_time * bins);
  {
    const double ratio = static_cast<double>(g.fft_size()) / static_cast<double>(frame);
    for (std::size_t b = 0; b < bins; ++b) {
      const double pos = std::min(static_cast<double>(b) * ratio, static_cast<double>(g.n_freq - 1));
      const auto k0 = static_cast<std::size_t>(std::floor(pos));
      const std::size_t k1 = std::min(k0 + 1, g.n_freq - 1);
      const double w = pos - static_cast<double>(k0);
      for (std::size_t j = 0; j < g.n_time; ++j)
        mult[j * bins + b] = (1.0 - w) * sym.at(j, k0) + w * sym.at(j, k1);
    }
  }

  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(frame));
  const double synth_scale = 1.0 / 1.5;  // sum of squared periodic Hann at hop frame/4

  RealFft fft(frame);
  std::vector<double> buf(frame), col_out(frame), mixed(frame);
  std::vector<std::complex<double>> spec(bins), prod(bins);
  std::vector<double> out(n, 0.0);
  const double inv_n = 1.0 / static_cast<double>(frame);
  const auto hop_g = static_cast<double>(g.hop);

  const auto first = -static_cast<std::ptrdiff_t>(frame - fhop);
  for (std::ptrdiff_t start = first; start < static_cast<std::ptrdiff_t>(n);
       start += static_cast<std::ptrdiff_t>(fhop)) {
    for (std::size_t i = 0; i < frame; ++i) {
      const std::ptrdiff_t s = start + static_cast<std::ptrdiff_t>(i);
      buf[i] = (s >= 0 && s < static_cast<std::ptrdiff_t>(n))
                   ? window[i] * signal[static_cast<std::size_t>(s)]
                   : 0.0;
    }
    fft.forward(buf, spec);

    // Only samples inside the signal matter.
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(start, 0);
    const std::ptrdiff_t hi =
        std::min<std::ptrdiff_t>(start + static_cast<std::ptrdiff_t>(frame), static_cast<std::ptrdiff_t>(n)) - 1;
    if (hi < lo) continue;
    const auto c_lo = static_cast<std::size_t>(std::floor(static_cast<double>(lo) / hop_g));
    const auto c_hi = std::min(g.n_time - 1,
                               static_cast<std::size_t>(std::ceil(static_cast<double>(hi) / hop_g)));

    std::fill(mixed.begin(), mixed.end(), 0.0);
    for (std::size_t c = c_lo; c <= c_hi; ++c) {
      const double* m = mult.data() + c * bins;
      for (std::size_t b = 0; b < bins; ++b) prod[b] = spec[b] * m[b];
      fft.inverse(prod, col_out);
      for (std::ptrdiff_t s = lo; s <= hi; ++s) {
        const double hat = 1.0 - std::abs(static_cast<double>(s) / hop_g - static_cast<double>(c));
        if (hat <= 0.0) continue;
        const auto i = static_cast<std::size_t>(s - start);
        mixed[i] += hat * col_out[i];
      }
    }
    for (std::ptrdiff_t s = lo; s <= hi; ++s) {
      const auto i = static_cast<std::size_t>(s - start);
      out[static_cast<std::size_t>(s)] += synth_scale * window[i] * mixed[i] * inv_n;
    }
  }
  return out;
}

}  // namespace psycodec::phase_space
