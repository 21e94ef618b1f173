#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace psycodec::wav {

struct Audio {
  std::vector<double> samples;  // integer PCM values on the unit scale
  std::uint32_t sample_rate = 0;
};

/// 16-bit PCM mono RIFF/WAVE only.
Audio read_wav(const std::string& path);
Audio parse_wav(std::span<const std::uint8_t> bytes);

/// Rounds to the nearest integer and clamps to the 16-bit range.
void write_wav(const std::string& path, std::span<const double> samples, std::uint32_t sample_rate);
std::vector<std::uint8_t> to_wav_bytes(std::span<const double> samples, std::uint32_t sample_rate);

}  // namespace psycodec::wav
