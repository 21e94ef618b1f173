#include "psycodec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bytes.hpp"
#include "psycodec/container.hpp"
#include "psycodec/error.hpp"

namespace psycodec::wav {

namespace {

[[noreturn]] void short_wav() { throw FormatError(FormatError::Reason::Truncated, "WAV file truncated"); }

bool tag_is(std::span<const std::uint8_t> b, const char* tag) { return std::memcmp(b.data(), tag, 4) == 0; }

}  // namespace

Audio parse_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, &short_wav);
  if (!tag_is(r.bytes(4), "RIFF")) throw FormatError(FormatError::Reason::BadMagic, "not a RIFF file");
  r.u32();
  if (!tag_is(r.bytes(4), "WAVE")) throw FormatError(FormatError::Reason::BadMagic, "not a WAVE file");

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  Audio audio;
  while (r.remaining() >= 8) {
    const auto tag = r.bytes(4);
    const std::uint32_t size = r.u32();
    if (tag_is(tag, "fmt ")) {
      const auto body = r.bytes(size);
      detail::ByteReader f(body, &short_wav);
      std::uint16_t format = f.u16();
      channels = f.u16();
      audio.sample_rate = f.u32();
      f.u32();
      f.u16();
      bits = f.u16();
      if (format == 0xFFFE && size >= 40) {
        f.u16();
        f.u16();
        f.u32();
        format = f.u16();
      }
      if (format != 1)
        throw FormatError(FormatError::Reason::Unsupported, "only PCM WAV files are supported");
      have_fmt = true;
    } else if (tag_is(tag, "data")) {
      if (!have_fmt) throw FormatError(FormatError::Reason::Malformed, "data chunk before fmt chunk");
      if (channels != 1)
        throw FormatError(FormatError::Reason::Unsupported,
                          "only mono input is supported (got " + std::to_string(channels) +
                              " channels); downmix first");
      if (bits != 16)
        throw FormatError(FormatError::Reason::Unsupported,
                          "only 16-bit PCM is supported (got " + std::to_string(bits) + "-bit)");
      if (audio.sample_rate == 0) throw FormatError(FormatError::Reason::Malformed, "zero sample rate");
      const std::size_t avail = std::min<std::size_t>(size, r.remaining());
      const auto body = r.bytes(avail - avail % 2);
      audio.samples.resize(body.size() / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i)
        audio.samples[i] = static_cast<std::int16_t>(body[2 * i] | (body[2 * i + 1] << 8));
      return audio;
    } else {
      r.bytes(size);
    }
    if (size % 2 != 0 && r.remaining() > 0) r.u8();
  }
  throw FormatError(FormatError::Reason::Malformed, "WAV file has no data chunk");
}

Audio read_wav(const std::string& path) {
  const auto bytes = container::read_file(path);
  try {
    return parse_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.reason(), path + ": " + e.what());
  }
}

std::vector<std::uint8_t> to_wav_bytes(std::span<const double> samples, std::uint32_t sample_rate) {
  if (sample_rate == 0) fail(ErrorKind::InvalidArgument, "sample rate must be positive");
  const std::uint64_t data = 2 * static_cast<std::uint64_t>(samples.size());
  if (data > 0xFFFFFFFFull - 36) fail(ErrorKind::InvalidArgument, "signal too long for a WAV file");
  detail::ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("RIFF"), 4));
  w.u32(static_cast<std::uint32_t>(36 + data));
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("WAVEfmt "), 8));
  w.u32(16);
  w.u16(1);
  w.u16(1);
  w.u32(sample_rate);
  w.u32(sample_rate * 2);
  w.u16(2);
  w.u16(16);
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("data"), 4));
  w.u32(static_cast<std::uint32_t>(data));
  for (double v : samples) {
    const double c = std::isfinite(v) ? std::clamp(std::nearbyint(v), -32768.0, 32767.0) : 0.0;
    w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(c)));
  }
  return std::move(w.data());
}

void write_wav(const std::string& path, std::span<const double> samples, std::uint32_t sample_rate) {
  container::write_file(path, to_wav_bytes(samples, sample_rate));
}

}  // namespace psycodec::wav
