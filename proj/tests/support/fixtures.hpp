#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace psycodec::testing {

inline constexpr double kRate = 44100.0;

/// Rounds to the nearest 16-bit PCM value.
std::vector<double> round16(std::vector<double> x);

/// amp * sin(2 pi hz t), rounded to 16 bits unless `exact`.
std::vector<double> tone(double fs, double seconds, double hz, double amp, bool exact = false);

/// Linear chirp from f0 to f1 Hz.
std::vector<double> chirp(double fs, double seconds, double f0, double f1, double amp);

/// Synthetic, deterministic music-like corpus items (16-bit, mono).
enum class Item { Piano, Pad, PercussionBass, Vowel, Plucked };
inline constexpr std::array<Item, 5> kItems = {Item::Piano, Item::Pad, Item::PercussionBass,
                                               Item::Vowel, Item::Plucked};
std::string_view name(Item item);
std::vector<double> music(Item item, double seconds = 30.0, double fs = kRate);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // about the mean
double mean_square(std::span<const double> x);
/// ||a - b|| / ||b||
double rel_rms(std::span<const double> a, std::span<const double> b);

}  // namespace psycodec::testing
