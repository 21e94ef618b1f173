#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "psycodec/codec.hpp"
#include "psycodec/error.hpp"
#include "psycodec/key_codebook.hpp"

using namespace psycodec;
using namespace psycodec::codec;
using Catch::Approx;
namespace fx = psycodec::testing;

namespace {

double max_frac_error(const PhaseSymbol& got, const PhaseSymbol& want) {
  double m = 0.0;
  for (std::size_t i = 0; i < want.values().size(); ++i)
    m = std::max(m, std::abs(got.values()[i] / want.values()[i] - 1.0));
  return m;
}

PhaseSymbol random_smooth_key(const TFGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 6.28);
  const double p1 = u(rng), p2 = u(rng), p3 = u(rng);
  PhaseSymbol s(g);
  for (std::size_t j = 0; j < g.n_time; ++j)
    for (std::size_t k = 0; k < g.n_freq; ++k) {
      const double t = static_cast<double>(j) / static_cast<double>(g.n_time);
      const double f = static_cast<double>(k) / static_cast<double>(g.n_freq);
      s.at(j, k) = std::exp(3.0 * std::sin(7 * t + p1) * std::cos(5 * f + p2) + std::sin(40 * f + p3));
    }
  return s;
}

}  // namespace

TEST_CASE("slice knot count", "[key]") {
  CHECK(slice_knots(2, 1) == 2);
  CHECK(slice_knots(10, 1) == 10);
  CHECK(slice_knots(10, 3) == 4);  // 0 3 6 9
  CHECK(slice_knots(11, 3) == 5);  // 0 3 6 9 10
}

TEST_CASE("packed keys stay inside the tolerance everywhere", "[key]") {
  const auto g = TFGrid::for_signal(8000.0, 40000, 0.004);
  for (std::uint64_t seed : {1u, 2u, 3u})
    for (double tol : {0.02, 0.10, 0.3}) {
      const auto key = random_smooth_key(g, seed);
      PackStats stats;
      const auto book = pack_key(key, tol, &stats);
      const auto back = unpack_key(book, g);
      const double err = max_frac_error(back, key);
      INFO("seed " << seed << " tol " << tol);
      CHECK(err <= tol);
      CHECK(stats.max_fractional_error == Approx(err));
      CHECK(book.knot_count() < key.values().size());
      CHECK(book.time_knots.front() == 0);
      CHECK(book.time_knots.back() == g.n_time - 1);
      CHECK(book.time_knots.size() == book.freq_steps.size());
    }
}

TEST_CASE("exponential tails are represented exactly", "[key]") {
  // The spline lives in the log domain, so a pure exponential needs only
  // its end knots.
  const auto g = TFGrid::for_signal(8000.0, 8000, 0.004);
  PhaseSymbol key(g);
  for (std::size_t j = 0; j < g.n_time; ++j)
    for (std::size_t k = 0; k < g.n_freq; ++k)
      key.at(j, k) = std::exp(-0.02 * static_cast<double>(k) + 0.01 * static_cast<double>(j));
  const auto book = pack_key(key, 0.10);
  CHECK(book.time_knots.size() == 2);
  CHECK(book.knot_count() == 4);
  CHECK(max_frac_error(unpack_key(book, g), key) <= 0.10);
}

TEST_CASE("constant key is tiny", "[key]") {
  const auto g = TFGrid::for_signal(44100.0, 441000, 0.01);
  const auto book = pack_key(PhaseSymbol(g, 7.0), 0.10);
  CHECK(serialize_key(book).size() < 64);
  const auto back = unpack_key(book, g);
  CHECK(back.min() == Approx(7.0).epsilon(0.10));
  CHECK(back.max() == Approx(7.0).epsilon(0.10));
}

TEST_CASE("serialization round trip", "[key]") {
  const auto x = fx::music(fx::Item::Pad, 1.0);
  const auto model = psycho::build_masking(x, fx::kRate, {});
  const auto key = build_key_lock(model, LockVariant::Wiener).key;
  const auto book = pack_key(key, 0.10);
  const auto bytes = serialize_key(book);
  const auto again = deserialize_key(bytes);
  CHECK(again == book);
  CHECK(serialize_key(again) == bytes);
  CHECK(max_frac_error(unpack_key(again, model.grid()), key) <= 0.10);
}

TEST_CASE("malformed keys are rejected", "[key]") {
  const auto g = TFGrid::for_signal(8000.0, 8000, 0.004);
  const auto bytes = serialize_key(pack_key(random_smooth_key(g, 4), 0.1));
  CHECK_THROWS_AS(deserialize_key({}), FormatError);
  CHECK_THROWS_AS(deserialize_key(std::span(bytes).first(bytes.size() / 2)), FormatError);
  auto bad = bytes;
  bad[bad.size() / 2] ^= 0xFF;
  CHECK_THROWS_AS(deserialize_key(bad), FormatError);
  auto book = pack_key(random_smooth_key(g, 4), 0.1);
  CHECK_THROWS_AS(unpack_key(book, TFGrid::for_signal(8000.0, 4000, 0.004)), Error);
}

TEST_CASE("non-positive keys are rejected", "[key]") {
  const auto g = TFGrid::for_signal(8000.0, 800, 0.004);
  PhaseSymbol key(g, 1.0);
  key.at(2, 3) = 0.0;
  CHECK_THROWS_AS(pack_key(key), Error);
  CHECK_THROWS_AS(pack_key(PhaseSymbol(g, 1.0), 0.0), Error);
  CHECK_THROWS_AS(pack_key(PhaseSymbol(g, 1.0), 1.0), Error);
}
