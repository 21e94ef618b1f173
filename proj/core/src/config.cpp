#include "psycodec/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "psycodec/error.hpp"

namespace psycodec {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(std::size_t line, std::string_view key) {
  return "config line " + std::to_string(line) + " (" + std::string(key) + ")";
}

double parse_double(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    fail(ErrorKind::InvalidArgument, where(line, key) + ": '" + std::string(v) + "' is not a number");
  return out;
}

std::uint64_t parse_uint(std::string_view v, std::size_t line, std::string_view key) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    fail(ErrorKind::InvalidArgument,
         where(line, key) + ": '" + std::string(v) + "' is not a non-negative integer");
  return out;
}

bool parse_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  fail(ErrorKind::InvalidArgument, where(line, key) + ": '" + std::string(v) + "' is not a boolean");
}

std::string num(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write config '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "error writing config '" + path + "'");
}

}  // namespace

codec::CodecConfig parse_config(const std::string& text, codec::CodecConfig base) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    if (key == "alpha") base.masking.alpha = parse_double(val, line_no, key);
    else if (key == "a_t") base.masking.a_t = parse_double(val, line_no, key);
    else if (key == "a_f") base.masking.a_f = parse_double(val, line_no, key);
    else if (key == "window_a") base.masking.window_a = parse_double(val, line_no, key);
    else if (key == "chunk_size") base.chunk_size = parse_uint(val, line_no, key);
    else if (key == "lock_variant") base.lock = codec::lock_variant_from_string(val);
    else if (key == "ath_offset_db")
      base.masking.ath_offset_db =
          val == "off" ? psycho::MaskingParams::kAthDisabled : parse_double(val, line_no, key);
    else if (key == "sofoo_order") base.sofoo_order = static_cast<int>(parse_uint(val, line_no, key));
    else if (key == "seed") base.seed = parse_uint(val, line_no, key);
    else if (key == "dither") base.dither = parse_bool(val, line_no, key);
    else fail(ErrorKind::InvalidArgument, where(line_no, key) + ": unknown key");
  }
  base.validate();
  return base;
}

codec::CodecConfig load_config(const std::string& path, codec::CodecConfig base) {
  try {
    return parse_config(read_text(path), base);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string format_config(const codec::CodecConfig& c) {
  std::string out;
  out += "alpha = " + num(c.masking.alpha) + "\n";
  out += "a_t = " + num(c.masking.a_t) + "\n";
  out += "a_f = " + num(c.masking.a_f) + "\n";
  out += "window_a = " + num(c.masking.window_a) + "\n";
  out += "chunk_size = " + std::to_string(c.chunk_size) + "\n";
  out += std::string("lock_variant = ") + codec::to_string(c.lock) + "\n";
  out += "ath_offset_db = " + (c.masking.ath_enabled() ? num(c.masking.ath_offset_db) : "off") + "\n";
  out += "sofoo_order = " + std::to_string(c.sofoo_order) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += std::string("dither = ") + (c.dither ? "true" : "false") + "\n";
  return out;
}

void save_config(const std::string& path, const codec::CodecConfig& config) {
  write_text(path, format_config(config));
}

void update_config_alpha(const std::string& path, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  std::string text;
  if (std::ifstream probe(path); probe) text = read_text(path);
  std::istringstream in(text);
  std::string raw, out;
  bool replaced = false;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    const auto hash = line.find('#');
    const auto body = trim(hash == std::string_view::npos ? line : line.substr(0, hash));
    const auto eq = body.find('=');
    if (!replaced && eq != std::string_view::npos && trim(body.substr(0, eq)) == "alpha") {
      out += "alpha = " + num(alpha);
      if (hash != std::string_view::npos) out += "  " + std::string(line.substr(hash));
      out += "\n";
      replaced = true;
      continue;
    }
    out += raw + "\n";
  }
  if (!replaced) out += "alpha = " + num(alpha) + "\n";
  parse_config(out);
  write_text(path, out);
}

}  // namespace psycodec
