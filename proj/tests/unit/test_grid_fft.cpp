#include <catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"
#include "psycodec/grid.hpp"

using namespace psycodec;
using Catch::Approx;

namespace {

// Direct O(n^2) DFT, the reference for the FFTW-backed wrappers.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ph = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * std::polar(1.0, ph);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("real fft matches the direct transform", "[fft]") {
  for (std::size_t n : {4u, 6u, 16u, 100u, 256u}) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> g;
    std::vector<double> x(n);
    std::vector<std::complex<double>> xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = x[i] = g(rng);
    RealFft fft(n);
    std::vector<std::complex<double>> spec(fft.bins());
    fft.forward(x, spec);
    const auto ref = naive_dft(xc, -1);
    for (std::size_t k = 0; k < fft.bins(); ++k) CHECK(std::abs(spec[k] - ref[k]) < 1e-10 * static_cast<double>(n));
    std::vector<double> back(n);
    fft.inverse(spec, back);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == Approx(static_cast<double>(n) * x[i]).margin(1e-9));
  }
}

TEST_CASE("complex fft matches the direct transform in both directions", "[fft]") {
  const std::size_t n = 48;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> x(n), y(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  ComplexFft fft(n);
  fft.forward(x, y);
  auto ref = naive_dft(x, -1);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-10);
  fft.inverse(x, y);
  ref = naive_dft(x, +1);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-10);
}

TEST_CASE("fft results do not depend on buffer alignment", "[fft]") {
  const std::size_t n = 64;
  std::vector<double> buf(n + 1);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = std::sin(0.3 * static_cast<double>(i * i));
  std::vector<double> a(buf.begin() + 1, buf.end());
  RealFft fft(n);
  std::vector<std::complex<double>> s1(fft.bins()), s2(fft.bins());
  fft.forward(a, s1);
  fft.forward(std::span<const double>(buf.data() + 1, n), s2);
  CHECK(s1 == s2);
}

TEST_CASE("next_pow2", "[fft]") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(2) == 2);
  CHECK(next_pow2(3) == 4);
  CHECK(next_pow2(1025) == 2048);
}

TEST_CASE("signal grid geometry", "[grid]") {
  const auto g = TFGrid::for_signal(44100.0, 44100, 0.01);
  CHECK(g.hop == 221);  // round(a fs / 2)
  CHECK(g.fft_size() == 4096);
  CHECK(g.n_freq == 2049);
  CHECK(g.freq_step == Approx(44100.0 / 4096.0));
  CHECK(g.n_time == (44099 + 220) / 221 + 1);
  CHECK(g.time_of(g.n_time - 1) >= 44099.0 / 44100.0);
  CHECK(g.freq_of(g.n_freq - 1) == Approx(g.nyquist()));
  CHECK(g.freq_weight(0) == 1.0);
  CHECK(g.freq_weight(1) == 2.0);
  CHECK(g.freq_weight(g.n_freq - 1) == 1.0);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("dense grid and the phase-space integral", "[grid]") {
  const auto g = TFGrid::dense(32);
  CHECK(g.layout == FreqLayout::FullCircle);
  CHECK(g.cell_area() == Approx(1.0 / 32.0));
  // The integral of 1 is the trace of the identity.
  CHECK(PhaseSymbol(g, 1.0).integral() == Approx(32.0));
  // One-sided grid: the integral of 1 is the number of samples spanned
  // (time) times the full band of one cycle per sample.
  const auto s = TFGrid::for_signal(1000.0, 1001, 0.01);
  const double span = static_cast<double>(s.n_time) * static_cast<double>(s.hop);
  const double band = static_cast<double>(2 * (s.n_freq - 1)) * s.freq_step / s.sample_rate;
  CHECK(PhaseSymbol(s, 1.0).integral() == Approx(span * band));
}

TEST_CASE("grid validation and symbol helpers", "[grid]") {
  CHECK_THROWS_AS(TFGrid::for_signal(0.0, 10, 0.01), Error);
  CHECK_THROWS_AS(TFGrid::for_signal(100.0, 10, -1.0), Error);
  TFGrid bad = TFGrid::dense(8);
  bad.n_freq = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(PhaseSymbol(TFGrid::dense(4), std::vector<double>(3)), Error);

  PhaseSymbol s(TFGrid::dense(4), 0.0);
  s.at(1, 2) = 8.0;
  CHECK(s.max() == 8.0);
  CHECK(s.min() == 0.0);
  const auto f = s.floored(0.5);
  CHECK(f.min() == 4.0);
  CHECK(f.at(1, 2) == 8.0);
  CHECK(PhaseSymbol(TFGrid::dense(4), 0.0).floored(1e-9).min() == 1e-9);
  s.at(0, 0) = NAN;
  CHECK_FALSE(s.all_finite());
}
