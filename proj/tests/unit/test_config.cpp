#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psycodec/config.hpp"
#include "psycodec/error.hpp"

using namespace psycodec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse recognizes every key", "[config]") {
  const auto c = parse_config(
      "# comment\n"
      "alpha = 0.05  # trailing\n"
      "a_t=0.03\n"
      "a_f = 80\n"
      "window_a = 0.002\n"
      "chunk_size = 2048\n"
      "lock_variant = sum\n"
      "ath_offset_db = off\n"
      "sofoo_order = 1\n"
      "seed = 42\n"
      "dither = yes\n"
      "\n");
  CHECK(c.masking.alpha == 0.05);
  CHECK(c.masking.a_t == 0.03);
  CHECK(c.masking.a_f == 80.0);
  CHECK(c.masking.window_a == 0.002);
  CHECK(c.chunk_size == 2048u);
  CHECK(c.lock == codec::LockVariant::Sum);
  CHECK_FALSE(c.masking.ath_enabled());
  CHECK(c.sofoo_order == 1);
  CHECK(c.seed == 42u);
  CHECK(c.dither);
}

TEST_CASE("format and parse round trip", "[config]") {
  codec::CodecConfig c;
  c.masking.alpha = 0.0371;
  c.masking.ath_offset_db = -3.5;
  c.seed = 123456789012345ull;
  c.lock = codec::LockVariant::PureInverse;
  const auto back = parse_config(format_config(c));
  CHECK(format_config(back) == format_config(c));
  CHECK(back.masking.alpha == 0.0371);
  CHECK(back.masking.ath_offset_db == -3.5);
  CHECK(back.seed == c.seed);
}

TEST_CASE("errors name the line and key", "[config]") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("\nalpha = abc\n").find("line 2 (alpha)") != std::string::npos);
  CHECK(message("bogus = 1\n").find("unknown key") != std::string::npos);
  CHECK(message("alpha\n").find("key=value") != std::string::npos);
  CHECK(message("seed = -4\n").find("non-negative") != std::string::npos);
  CHECK(message("dither = maybe\n").find("boolean") != std::string::npos);
  CHECK(message("alpha = 0\n") != "no error");
  CHECK(message("lock_variant = zero\n") != "no error");
}

TEST_CASE("files: load, save and alpha update", "[config]") {
  const fs::path dir = fs::temp_directory_path() / "psycodec_config_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = (dir / "psycodec.cfg").string();

  try {
    load_config(path);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }

  SECTION("alpha update creates a missing file") {
    update_config_alpha(path, 0.08);
    CHECK(load_config(path).masking.alpha == 0.08);
  }
  SECTION("alpha update keeps other lines and comments") {
    std::ofstream(path) << "# mine\nseed = 9\nalpha = 0.1   # tuned\ndither = true\n";
    update_config_alpha(path, 0.025);
    CHECK(slurp(path) == "# mine\nseed = 9\nalpha = 0.025  # tuned\ndither = true\n");
    const auto c = load_config(path);
    CHECK(c.seed == 9u);
    CHECK(c.dither);
  }
  SECTION("invalid alpha leaves the file alone") {
    std::ofstream(path) << "alpha = 0.1\n";
    CHECK_THROWS_AS(update_config_alpha(path, 0.0), Error);
    CHECK_THROWS_AS(update_config_alpha(path, 1.5), Error);
    CHECK(slurp(path) == "alpha = 0.1\n");
  }
  SECTION("a bad file names its path") {
    std::ofstream(path) << "alpha = x\n";
    try {
      load_config(path);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
  }
  SECTION("save then load") {
    codec::CodecConfig c;
    c.masking.a_f = 120.0;
    save_config(path, c);
    CHECK(load_config(path).masking.a_f == 120.0);
  }
  fs::remove_all(dir);
}
