#include "psycodec/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"
#include "psycodec/noise_model.hpp"
#include "psycodec/phase_space.hpp"

namespace psycodec::codec {

namespace {

using phase_space::ScalarFunction;

PhaseSymbol pointwise(const PhaseSymbol& a, const PhaseSymbol& b, double (*op)(double, double)) {
  PhaseSymbol out(a.grid());
  const auto x = a.values();
  const auto y = b.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = op(x[i], y[i]);
  return out;
}

// Per-chunk dither stream, independent of how chunks are split over threads.
std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(chunk) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void fill_dither(std::vector<double>& d, std::uint64_t seed, std::size_t chunk) {
  noise::Rng rng(chunk_seed(seed, chunk));
  for (auto& v : d) v = rng.centered();
}

std::uint32_t checked_rate(double sample_rate) {
  if (!(sample_rate >= 1.0) || sample_rate > 4294967295.0 || sample_rate != std::floor(sample_rate))
    fail(ErrorKind::InvalidArgument, "sample rate must be a positive integer");
  return static_cast<std::uint32_t>(sample_rate);
}

StreamHeader make_header(std::size_t n, double sample_rate, const CodecConfig& stored) {
  StreamHeader h;
  h.sample_rate = checked_rate(sample_rate);
  h.num_samples = n;
  h.chunk_size = static_cast<std::uint16_t>(stored.chunk_size);
  h.alpha = static_cast<float>(stored.masking.alpha);
  h.a_t = static_cast<float>(stored.masking.a_t);
  h.a_f = static_cast<float>(stored.masking.a_f);
  h.window_a = static_cast<float>(stored.masking.window_a);
  h.lock_variant = stored.lock;
  h.seed = stored.seed;
  return h;
}

void check_model(std::span<const double> signal, double sample_rate, const psycho::MaskingModel& model,
                 const StreamHeader& header) {
  if (signal.empty()) fail(ErrorKind::InvalidArgument, "cannot encode an empty signal");
  if (!(stream_grid(header) == model.grid()))
    fail(ErrorKind::InvalidArgument,
         "masking model grid does not match the stored parameters (build it from config.stored())");
  (void)sample_rate;
}

}  // namespace

const char* to_string(LockVariant v) {
  switch (v) {
    case LockVariant::PureInverse: return "pure_inverse";
    case LockVariant::Sum: return "sum";
    case LockVariant::Wiener: return "wiener";
    case LockVariant::Zero: return "zero";
  }
  return "unknown";
}

LockVariant lock_variant_from_string(std::string_view s) {
  if (s == "pure_inverse" || s == "PURE_INVERSE") return LockVariant::PureInverse;
  if (s == "sum" || s == "SUM") return LockVariant::Sum;
  if (s == "wiener" || s == "WIENER") return LockVariant::Wiener;
  fail(ErrorKind::InvalidArgument, "unknown lock variant '" + std::string(s) + "'");
}

KeyLock build_key_lock(const psycho::MaskingModel& model, LockVariant variant, int sofoo_order) {
  const PhaseSymbol& m = model.M;
  if (!(m.min() > 0.0)) fail(ErrorKind::Numerical, "floor failure: M is not strictly positive");
  KeyLock kl;
  kl.key = phase_space::symbol_function(m, ScalarFunction::sqrt(), sofoo_order);
  switch (variant) {
    case LockVariant::PureInverse:
      kl.lock = phase_space::symbol_function(m, ScalarFunction::inv_sqrt(), sofoo_order);
      break;
    case LockVariant::Sum: {
      const auto root_h = phase_space::symbol_function(model.H, ScalarFunction::sqrt(), 0);
      kl.lock = pointwise(kl.key, root_h, [](double k, double h) { return 1.0 / (k + h); });
      break;
    }
    case LockVariant::Wiener: {
      PhaseSymbol denom = pointwise(m, model.H, [](double a, double b) { return a + b; });
      kl.lock = pointwise(kl.key, denom, [](double k, double d) { return k / d; });
      break;
    }
    case LockVariant::Zero:
      kl.lock = PhaseSymbol(m.grid(), 0.0);
      break;
  }
  if (!kl.key.all_finite() || !kl.lock.all_finite() || !(kl.key.min() > 0.0))
    fail(ErrorKind::Numerical, "key or lock is not finite and positive");
  return kl;
}

CodecConfig CodecConfig::stored() const {
  CodecConfig c = *this;
  auto f32 = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  c.masking.alpha = f32(masking.alpha);
  c.masking.a_t = f32(masking.a_t);
  c.masking.a_f = f32(masking.a_f);
  c.masking.window_a = f32(masking.window_a);
  return c;
}

void CodecConfig::validate() const {
  masking.validate();
  if (chunk_size < 2 || chunk_size % 2 != 0 || chunk_size > 65534)
    fail(ErrorKind::InvalidArgument, "chunk_size must be even and in [2, 65534]");
  if (sofoo_order != 0 && sofoo_order != 1) fail(ErrorKind::InvalidArgument, "sofoo_order must be 0 or 1");
  if (!(key_tolerance > 0.0 && key_tolerance < 1.0))
    fail(ErrorKind::InvalidArgument, "key_tolerance must lie in (0, 1)");
  if (threads == 0) fail(ErrorKind::InvalidArgument, "threads must be at least 1");
  if (lock == LockVariant::Zero) fail(ErrorKind::InvalidArgument, "lock 'zero' is only used by noisy mode");
}

TFGrid stream_grid(const StreamHeader& header) {
  if (header.num_samples == 0) fail(ErrorKind::Format, "stream has no samples");
  return TFGrid::for_signal(static_cast<double>(header.sample_rate),
                            static_cast<std::size_t>(header.num_samples),
                            static_cast<double>(header.window_a));
}

std::vector<double> encode_continuous(std::span<const double> signal, const KeyLock& kl) {
  return phase_space::apply_symbol(kl.lock, signal);
}

std::vector<std::vector<std::int32_t>> quantize_chunks(std::span<const double> encoded,
                                                       std::size_t chunk_size, bool dither,
                                                       std::uint64_t seed, unsigned threads) {
  if (chunk_size < 2 || chunk_size % 2 != 0) fail(ErrorKind::InvalidArgument, "chunk_size must be even");
  const std::size_t n = encoded.size();
  const std::size_t count = (n + chunk_size - 1) / chunk_size;
  std::vector<std::vector<std::int32_t>> chunks(count);
  std::vector<std::string> errors(std::max(1u, threads));

  auto worker = [&](unsigned w, unsigned stride) {
    try {
      RealFft fft(chunk_size);
      std::vector<double> buf(chunk_size), coef(chunk_size), d(chunk_size, 0.0);
      std::vector<std::complex<double>> spec(fft.bins());
      const double s0 = 1.0 / std::sqrt(static_cast<double>(chunk_size));
      const double s1 = std::numbers::sqrt2 * s0;
      const std::size_t half = chunk_size / 2;
      for (std::size_t c = w; c < count; c += stride) {
        const std::size_t base = c * chunk_size;
        const std::size_t len = std::min(chunk_size, n - base);
        std::fill(buf.begin(), buf.end(), 0.0);
        std::copy_n(encoded.begin() + static_cast<std::ptrdiff_t>(base), len, buf.begin());
        fft.forward(buf, spec);
        coef[0] = spec[0].real() * s0;
        coef[1] = spec[half].real() * s0;
        for (std::size_t k = 1; k < half; ++k) {
          coef[2 * k] = spec[k].real() * s1;
          coef[2 * k + 1] = spec[k].imag() * s1;
        }
        if (dither) fill_dither(d, seed, c);
        auto& out = chunks[c];
        out.resize(chunk_size);
        for (std::size_t i = 0; i < chunk_size; ++i) {
          const double q = std::nearbyint(coef[i] + d[i]);
          if (!(std::abs(q) <= static_cast<double>(kCoefficientLimit)))
            fail(ErrorKind::Numerical, "coefficient overload in chunk " + std::to_string(c));
          out[i] = static_cast<std::int32_t>(q);
        }
      }
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w, workers);
  }
  for (const auto& e : errors)
    if (!e.empty()) fail(ErrorKind::Numerical, e);
  return chunks;
}

std::vector<double> dequantize_chunks(const std::vector<std::vector<std::int32_t>>& chunks,
                                      std::size_t chunk_size, std::size_t num_samples, bool dither,
                                      std::uint64_t seed) {
  if (chunk_size < 2 || chunk_size % 2 != 0) fail(ErrorKind::InvalidArgument, "chunk_size must be even");
  if (chunks.size() * chunk_size < num_samples)
    fail(ErrorKind::Format, "chunk payload shorter than the sample count");
  RealFft fft(chunk_size);
  std::vector<double> d(chunk_size, 0.0), buf(chunk_size);
  std::vector<std::complex<double>> spec(fft.bins());
  const double root_n = std::sqrt(static_cast<double>(chunk_size));
  const double r1 = root_n / std::numbers::sqrt2;
  const double inv = 1.0 / static_cast<double>(chunk_size);
  const std::size_t half = chunk_size / 2;
  std::vector<double> out(num_samples);
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const auto& q = chunks[c];
    if (q.size() != chunk_size) fail(ErrorKind::Format, "chunk " + std::to_string(c) + " has the wrong size");
    if (dither) fill_dither(d, seed, c);
    auto coef = [&](std::size_t i) { return static_cast<double>(q[i]) - d[i]; };
    spec[0] = coef(0) * root_n;
    spec[half] = coef(1) * root_n;
    for (std::size_t k = 1; k < half; ++k) spec[k] = {coef(2 * k) * r1, coef(2 * k + 1) * r1};
    fft.inverse(spec, buf);
    const std::size_t base = c * chunk_size;
    if (base >= num_samples) break;
    const std::size_t len = std::min(chunk_size, num_samples - base);
    for (std::size_t i = 0; i < len; ++i) out[base + i] = buf[i] * inv;
  }
  return out;
}

EncodedStream encode(std::span<const double> signal, double sample_rate,
                     const psycho::MaskingModel& model, const CodecConfig& config) {
  config.validate();
  const CodecConfig stored = config.stored();
  EncodedStream s;
  s.header = make_header(signal.size(), sample_rate, stored);
  if (stored.dither) s.header.flags |= kFlagDither;
  check_model(signal, sample_rate, model, s.header);

  const KeyLock kl = build_key_lock(model, stored.lock, stored.sofoo_order);
  const auto encoded = encode_continuous(signal, kl);
  s.chunks = quantize_chunks(encoded, stored.chunk_size, stored.dither, stored.seed, stored.threads);
  s.key = pack_key(kl.key, stored.key_tolerance);
  return s;
}

EncodedStream encode(std::span<const double> signal, double sample_rate, const CodecConfig& config) {
  config.validate();
  const auto model = psycho::build_masking(signal, sample_rate, config.stored().masking);
  return encode(signal, sample_rate, model, config);
}

std::vector<double> decode(const EncodedStream& stream) {
  const StreamHeader& h = stream.header;
  if (h.version != kStreamVersion)
    fail(ErrorKind::Format, "unsupported stream version " + std::to_string(h.version));
  const TFGrid grid = stream_grid(h);
  const PhaseSymbol key = unpack_key(stream.key, grid);
  const auto n = static_cast<std::size_t>(h.num_samples);
  std::vector<double> restored_input;
  if (h.noisy()) {
    if (!stream.chunks.empty()) fail(ErrorKind::Format, "noisy stream carries a payload");
    restored_input = noise::white_noise(n, h.seed);
    const double unit = std::sqrt(12.0);
    for (auto& v : restored_input) v *= unit;
  } else {
    if (stream.chunks.size() != h.chunk_count())
      fail(ErrorKind::Format, "chunk count does not match the sample count");
    restored_input = dequantize_chunks(stream.chunks, h.chunk_size, n, h.dithered(), h.seed);
  }
  return phase_space::apply_symbol(key, restored_input);
}

EncodedStream encode_noisy(std::span<const double> signal, double sample_rate,
                           const psycho::MaskingModel& model, const CodecConfig& config) {
  CodecConfig c = config;
  c.lock = LockVariant::Wiener;  // validated as an ordinary config, then overridden
  c.validate();
  const CodecConfig stored = c.stored();
  EncodedStream s;
  s.header = make_header(signal.size(), sample_rate, stored);
  s.header.lock_variant = LockVariant::Zero;
  s.header.flags = kFlagNoisy;
  check_model(signal, sample_rate, model, s.header);
  const auto key = phase_space::symbol_function(model.S, ScalarFunction::sqrt(), stored.sofoo_order);
  s.key = pack_key(key, stored.key_tolerance);
  return s;
}

std::vector<double> transform_roundtrip(std::span<const double> signal, const KeyLock& kl) {
  const auto encoded = encode_continuous(signal, kl);
  return phase_space::apply_symbol(kl.key, encoded);
}

}  // namespace psycodec::codec
