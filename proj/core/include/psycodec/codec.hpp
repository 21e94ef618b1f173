#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "psycodec/grid.hpp"
#include "psycodec/key_codebook.hpp"
#include "psycodec/psychoacoustics.hpp"

namespace psycodec::codec {

enum class LockVariant : std::uint8_t {
  PureInverse = 0,  // M^{-1/2}
  Sum = 1,          // 1 / (M^{1/2} + H^{1/2})
  Wiener = 2,       // M^{1/2} / (M + H)
  Zero = 3,         // noisy mode: no lock, payload empty
};

const char* to_string(LockVariant v);
LockVariant lock_variant_from_string(std::string_view s);

struct KeyLock {
  PhaseSymbol key;
  PhaseSymbol lock;
};

/// key = M^{1/2}; lock per variant. sofoo_order 1 applies the first
/// correction to both square roots.
KeyLock build_key_lock(const psycho::MaskingModel& model, LockVariant variant, int sofoo_order = 0);

struct CodecConfig {
  psycho::MaskingParams masking;
  std::size_t chunk_size = 1024;
  LockVariant lock = LockVariant::Wiener;
  int sofoo_order = 0;
  std::uint64_t seed = 0;
  /// Subtractive dither on the DFT coefficients, seeded by `seed`.
  bool dither = false;
  double key_tolerance = 0.10;
  /// Worker threads for the chunk stage; output bytes do not depend on it.
  unsigned threads = 1;

  /// Masking parameters rounded through float32 as they are stored in the
  /// stream header, so encoder and decoder build identical grids.
  CodecConfig stored() const;
  void validate() const;
};

inline constexpr std::uint8_t kFlagNoisy = 0x1;
inline constexpr std::uint8_t kFlagDither = 0x2;
inline constexpr std::uint8_t kStreamVersion = 1;
/// Largest quantized coefficient magnitude the container accepts.
inline constexpr std::int64_t kCoefficientLimit = (std::int64_t{1} << 31) - 1;

struct StreamHeader {
  std::uint8_t version = kStreamVersion;
  std::uint32_t sample_rate = 0;
  std::uint64_t num_samples = 0;
  std::uint16_t chunk_size = 0;
  float alpha = 0.0f;
  float a_t = 0.0f;
  float a_f = 0.0f;
  float window_a = 0.0f;
  LockVariant lock_variant = LockVariant::PureInverse;
  std::uint8_t flags = 0;
  std::uint64_t seed = 0;
  std::uint32_t key_length = 0;      // filled by the writer
  std::uint64_t payload_length = 0;  // filled by the writer

  bool noisy() const noexcept { return flags & kFlagNoisy; }
  bool dithered() const noexcept { return flags & kFlagDither; }
  std::size_t chunk_count() const noexcept {
    return chunk_size == 0 ? 0 : (num_samples + chunk_size - 1) / chunk_size;
  }

  bool operator==(const StreamHeader&) const = default;
};

struct EncodedStream {
  StreamHeader header;
  KeyCodebook key;
  /// Quantized coefficients per chunk, chunk_size integers each, laid out
  /// as [c0, cN/2, re1, im1, re2, im2, ...].
  std::vector<std::vector<std::int32_t>> chunks;

  bool operator==(const EncodedStream&) const = default;
};

/// Grid a stream's key lives on, reconstructed from its header.
TFGrid stream_grid(const StreamHeader& header);

/// lock applied to the signal, before quantization.
std::vector<double> encode_continuous(std::span<const double> signal, const KeyLock& kl);

/// Orthonormal real DFT chunking and rounding; `seed` drives subtractive
/// dither when `dither` is set.
std::vector<std::vector<std::int32_t>> quantize_chunks(std::span<const double> encoded,
                                                       std::size_t chunk_size, bool dither,
                                                       std::uint64_t seed, unsigned threads = 1);
std::vector<double> dequantize_chunks(const std::vector<std::vector<std::int32_t>>& chunks,
                                      std::size_t chunk_size, std::size_t num_samples, bool dither,
                                      std::uint64_t seed);

EncodedStream encode(std::span<const double> signal, double sample_rate,
                     const psycho::MaskingModel& model, const CodecConfig& config);

/// Convenience: builds the masking model from config (with stored params).
EncodedStream encode(std::span<const double> signal, double sample_rate, const CodecConfig& config);

std::vector<double> decode(const EncodedStream& stream);

/// Noisy mode: only the key K = S^{1/2} and a dither seed are stored.
EncodedStream encode_noisy(std::span<const double> signal, double sample_rate,
                           const psycho::MaskingModel& model, const CodecConfig& config);

/// key(lock(psi)) with no quantization.
std::vector<double> transform_roundtrip(std::span<const double> signal, const KeyLock& kl);

}  // namespace psycodec::codec
