#include <catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "psycodec/container.hpp"
#include "psycodec/error.hpp"
#include "psycodec/wav.hpp"

using namespace psycodec;
using Reason = FormatError::Reason;
namespace fx = psycodec::testing;

namespace {

void put16(std::vector<std::uint8_t>& b, std::size_t o, unsigned v) {
  b[o] = v & 0xFF;
  b[o + 1] = (v >> 8) & 0xFF;
}

Reason reason_of(std::span<const std::uint8_t> bytes) {
  try {
    wav::parse_wav(bytes);
  } catch (const FormatError& e) {
    return e.reason();
  }
  FAIL("wav parsed");
  return Reason::Malformed;
}

}  // namespace

TEST_CASE("write then read is the identity on 16-bit values", "[wav]") {
  std::mt19937 rng(12);
  std::vector<double> x(10001);
  for (auto& v : x) v = static_cast<double>(static_cast<int>(rng() % 65536) - 32768);
  x[0] = -32768;
  x[1] = 32767;
  const auto bytes = wav::to_wav_bytes(x, 48000);
  CHECK(bytes.size() == 44 + 2 * x.size());
  const auto a = wav::parse_wav(bytes);
  CHECK(a.sample_rate == 48000u);
  CHECK(a.samples == x);

  const auto path = (std::filesystem::temp_directory_path() / "psycodec_wav_test.wav").string();
  wav::write_wav(path, x, 22050);
  const auto b = wav::read_wav(path);
  CHECK(b.samples == x);
  CHECK(b.sample_rate == 22050u);
  std::filesystem::remove(path);
}

TEST_CASE("full-scale sine is bit exact", "[wav]") {
  const auto x = fx::tone(fx::kRate, 0.5, 997.0, 32767.0);
  CHECK(wav::parse_wav(wav::to_wav_bytes(x, 44100)).samples == x);
}

TEST_CASE("writer rounds and clamps", "[wav]") {
  const std::vector<double> x = {0.4, 0.6, -0.6, 1e6, -1e6, std::nan("")};
  const auto a = wav::parse_wav(wav::to_wav_bytes(x, 8000));
  CHECK(a.samples == std::vector<double>{0, 1, -1, 32767, -32768, 0});
  CHECK_THROWS_AS(wav::to_wav_bytes(x, 0), Error);
}

TEST_CASE("unsupported and malformed files are rejected", "[wav]") {
  const auto good = wav::to_wav_bytes(std::vector<double>(100, 5.0), 44100);
  SECTION("stereo names the mono scope") {
    auto b = good;
    put16(b, 22, 2);
    try {
      wav::parse_wav(b);
      FAIL("no throw");
    } catch (const FormatError& e) {
      CHECK(e.reason() == Reason::Unsupported);
      CHECK(std::string(e.what()).find("mono") != std::string::npos);
    }
  }
  SECTION("24-bit") {
    auto b = good;
    put16(b, 34, 24);
    CHECK(reason_of(b) == Reason::Unsupported);
  }
  SECTION("float format") {
    auto b = good;
    put16(b, 20, 3);
    CHECK(reason_of(b) == Reason::Unsupported);
  }
  SECTION("not RIFF") {
    auto b = good;
    b[0] = 'X';
    CHECK(reason_of(b) == Reason::BadMagic);
  }
  SECTION("truncated header") {
    CHECK(reason_of(std::span<const std::uint8_t>(good).first(30)) == Reason::Truncated);
  }
  SECTION("no data chunk") {
    CHECK(reason_of(std::span<const std::uint8_t>(good).first(36)) == Reason::Malformed);
  }
}

TEST_CASE("unknown chunks are skipped", "[wav]") {
  auto b = wav::to_wav_bytes(std::vector<double>{1, 2, 3}, 44100);
  // Insert an odd-sized LIST chunk (with its pad byte) between fmt and data.
  const std::vector<std::uint8_t> list = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  b.insert(b.begin() + 36, list.begin(), list.end());
  CHECK(wav::parse_wav(b).samples == std::vector<double>{1, 2, 3});
}
