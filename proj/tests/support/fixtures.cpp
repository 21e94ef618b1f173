#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace psycodec::testing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> normalize(std::vector<double> x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (auto& v : x) v *= peak / m;
  return round16(std::move(x));
}

double envelope(double t, double attack, double decay) {
  if (t < 0.0) return 0.0;
  return std::min(1.0, t / attack) * std::exp(-t / decay);
}

// Sum of harmonics of f0 with per-harmonic amplitude and decay.
void add_note(std::vector<double>& out, double fs, double start, double dur, double f0,
              double amp, int harmonics, double decay, double inharm) {
  const auto s0 = static_cast<std::size_t>(start * fs);
  const auto len = static_cast<std::size_t>(dur * fs);
  for (int k = 1; k <= harmonics; ++k) {
    const double fk = f0 * k * std::sqrt(1.0 + inharm * k * k);
    if (fk > 0.45 * fs) break;
    const double ak = amp / k;
    const double dk = decay / (1.0 + 0.4 * (k - 1));
    for (std::size_t i = 0; i < len && s0 + i < out.size(); ++i) {
      const double t = static_cast<double>(i) / fs;
      out[s0 + i] += ak * envelope(t, 0.004, dk) * std::sin(kTwoPi * fk * t);
    }
  }
}

double midi_hz(int note) { return 440.0 * std::pow(2.0, (note - 69) / 12.0); }

std::vector<double> piano(double seconds, double fs) {
  std::vector<double> out(static_cast<std::size_t>(seconds * fs), 0.0);
  std::mt19937_64 rng(11);
  const int scale[] = {0, 2, 4, 5, 7, 9, 11, 12};
  double t = 0.0;
  while (t < seconds) {
    const double dur = 0.3 + 0.1 * static_cast<double>(rng() % 5);
    const int note = 57 + scale[rng() % 8] + 12 * static_cast<int>(rng() % 2);
    add_note(out, fs, t, std::min(2.5, seconds - t), midi_hz(note), 1.0, 12, 0.6, 1e-4);
    if (rng() % 3 == 0) add_note(out, fs, t, std::min(2.5, seconds - t), midi_hz(note - 12), 0.6, 10, 0.8, 1e-4);
    t += dur;
  }
  return normalize(std::move(out), 14000.0);
}

std::vector<double> pad(double seconds, double fs) {
  const std::size_t n = static_cast<std::size_t>(seconds * fs);
  std::vector<double> out(n, 0.0);
  const int chords[4][3] = {{57, 60, 64}, {53, 57, 60}, {55, 59, 62}, {52, 55, 59}};
  const double period = 4.0;
  for (std::size_t c = 0; c * period < seconds; ++c) {
    const double start = static_cast<double>(c) * period;
    for (int v = 0; v < 3; ++v) {
      for (double detune : {-0.004, 0.0, 0.005}) {
        const double f0 = midi_hz(chords[c % 4][v]) * (1.0 + detune);
        for (int k = 1; k <= 14; ++k) {
          const double fk = f0 * k;
          if (fk > 8000.0) break;
          const double ak = 1.0 / (k * (1.0 + 0.15 * k));
          const double ph = 0.37 * k + v + detune * 100.0;
          const auto s0 = static_cast<std::size_t>(start * fs);
          const auto len = static_cast<std::size_t>((period + 1.0) * fs);
          for (std::size_t i = 0; i < len && s0 + i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            const double env = std::min(1.0, t / 0.8) * std::min(1.0, std::max(0.0, (period + 1.0 - t) / 1.0));
            const double lfo = 1.0 + 0.003 * std::sin(kTwoPi * 0.3 * t + k);
            out[s0 + i] += ak * env * std::sin(kTwoPi * fk * lfo * t + ph);
          }
        }
      }
    }
  }
  return normalize(std::move(out), 12000.0);
}

std::vector<double> percussion_bass(double seconds, double fs) {
  const std::size_t n = static_cast<std::size_t>(seconds * fs);
  std::vector<double> out(n, 0.0);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double beat = 0.5;
  const int bass_line[8] = {33, 33, 36, 38, 33, 33, 31, 28};
  for (std::size_t b = 0; b * beat < seconds; ++b) {
    const auto s0 = static_cast<std::size_t>(static_cast<double>(b) * beat * fs);
    const auto len = static_cast<std::size_t>(beat * fs);
    for (std::size_t i = 0; i < len && s0 + i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      double v = 0.0;
      if (b % 2 == 0) {
        const double phase = kTwoPi * (50.0 * t + 100.0 * 0.03 * (1.0 - std::exp(-t / 0.03)));
        v += 1.0 * std::exp(-t / 0.15) * std::sin(phase);
      } else {
        v += 0.5 * std::exp(-t / 0.08) * uni(rng) + 0.3 * std::exp(-t / 0.05) * std::sin(kTwoPi * 180.0 * t);
      }
      out[s0 + i] += v;
    }
    // hi-hat on eighths: differenced noise
    for (int h = 0; h < 2; ++h) {
      const auto h0 = s0 + static_cast<std::size_t>(h * beat * 0.5 * fs);
      double prev = 0.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(0.1 * fs) && h0 + i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double w = uni(rng);
        out[h0 + i] += 0.15 * std::exp(-t / 0.02) * (w - prev);
        prev = w;
      }
    }
    const double f0 = midi_hz(bass_line[b % 8]);
    for (int k = 1; k <= 6; ++k)
      for (std::size_t i = 0; i < len && s0 + i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        out[s0 + i] += 0.5 / k * envelope(t, 0.005, 0.35) * std::sin(kTwoPi * f0 * k * t);
      }
  }
  return normalize(std::move(out), 18000.0);
}

std::vector<double> vowel(double seconds, double fs) {
  const std::size_t n = static_cast<std::size_t>(seconds * fs);
  std::vector<double> out(n, 0.0);
  // (F1, F2, F3) for /a/, /i/, /u/, /e/
  const double formants[4][3] = {{730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240}, {530, 1840, 2480}};
  const double bw[3] = {80.0, 100.0, 150.0};
  const double phrase = 1.5;
  const double pitches[5] = {130.0, 147.0, 165.0, 147.0, 110.0};
  constexpr int kHarm = 40;
  double f0_phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const auto p = static_cast<std::size_t>(t / phrase);
    const double u = t / phrase - static_cast<double>(p);
    const double base = pitches[p % 5];
    const double f0 = base * (1.0 + 0.02 * std::sin(kTwoPi * 5.5 * t));
    f0_phase += f0 / fs;
    const auto& fa = formants[p % 4];
    const auto& fb = formants[(p + 1) % 4];
    const double glide = u < 0.8 ? 0.0 : (u - 0.8) / 0.2;
    const double env = std::min(1.0, u / 0.05) * (u < 0.92 ? 1.0 : std::max(0.0, (1.0 - u) / 0.08));
    double v = 0.0;
    for (int k = 1; k <= kHarm; ++k) {
      const double fk = f0 * k;
      if (fk > 5000.0) break;
      double g = 0.0;
      for (int m = 0; m < 3; ++m) {
        const double fm = fa[m] + glide * (fb[m] - fa[m]);
        const double d = (fk - fm) / bw[m];
        g += 1.0 / (1.0 + d * d) / (m + 1);
      }
      v += g / k * std::sin(kTwoPi * f0_phase * k + 0.1 * k);
    }
    out[i] = env * v;
  }
  return normalize(std::move(out), 15000.0);
}

std::vector<double> plucked(double seconds, double fs) {
  const std::size_t n = static_cast<std::size_t>(seconds * fs);
  std::vector<double> out(n, 0.0);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int notes[6] = {52, 57, 62, 67, 71, 76};
  double t = 0.0;
  int idx = 0;
  while (t < seconds) {
    const double f0 = midi_hz(notes[(idx * 5 + idx / 6) % 6]);
    const auto period = static_cast<std::size_t>(std::lround(fs / f0));
    std::vector<double> line(period);
    for (auto& v : line) v = uni(rng);
    const auto s0 = static_cast<std::size_t>(t * fs);
    const auto len = static_cast<std::size_t>(2.0 * fs);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < len && s0 + i < n; ++i) {
      const std::size_t nxt = (pos + 1) % period;
      const double y = line[pos];
      line[pos] = 0.996 * 0.5 * (line[pos] + line[nxt]);
      pos = nxt;
      out[s0 + i] += y;
    }
    t += 0.25 + 0.125 * static_cast<double>(rng() % 3);
    ++idx;
  }
  return normalize(std::move(out), 15000.0);
}

}  // namespace

std::vector<double> round16(std::vector<double> x) {
  for (auto& v : x) v = std::clamp(std::nearbyint(v), -32768.0, 32767.0);
  return x;
}

std::vector<double> tone(double fs, double seconds, double hz, double amp, bool exact) {
  std::vector<double> x(static_cast<std::size_t>(std::lround(seconds * fs)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = amp * std::sin(kTwoPi * hz * static_cast<double>(i) / fs);
  return exact ? x : round16(std::move(x));
}

std::vector<double> chirp(double fs, double seconds, double f0, double f1, double amp) {
  std::vector<double> x(static_cast<std::size_t>(std::lround(seconds * fs)));
  const double k = (f1 - f0) / seconds;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = amp * std::sin(kTwoPi * (f0 * t + 0.5 * k * t * t));
  }
  return round16(std::move(x));
}

std::string_view name(Item item) {
  switch (item) {
    case Item::Piano: return "piano";
    case Item::Pad: return "pad";
    case Item::PercussionBass: return "percussion_bass";
    case Item::Vowel: return "vowel";
    case Item::Plucked: return "plucked";
  }
  return "?";
}

std::vector<double> music(Item item, double seconds, double fs) {
  switch (item) {
    case Item::Piano: return piano(seconds, fs);
    case Item::Pad: return pad(seconds, fs);
    case Item::PercussionBass: return percussion_bass(seconds, fs);
    case Item::Vowel: return vowel(seconds, fs);
    case Item::Plucked: return plucked(seconds, fs);
  }
  return {};
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double rel_rms(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace psycodec::testing
