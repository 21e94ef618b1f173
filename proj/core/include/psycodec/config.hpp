#pragma once

#include <string>

#include "psycodec/codec.hpp"

namespace psycodec {

/// Plain-text key=value configuration. Recognized keys: alpha, a_t, a_f,
/// window_a, chunk_size, lock_variant, ath_offset_db, sofoo_order, seed,
/// dither. '#' starts a comment. ath_offset_db accepts "off".
codec::CodecConfig parse_config(const std::string& text, codec::CodecConfig base = {});
codec::CodecConfig load_config(const std::string& path, codec::CodecConfig base = {});
std::string format_config(const codec::CodecConfig& config);
void save_config(const std::string& path, const codec::CodecConfig& config);

/// Rewrites only the alpha line of an existing file (creating it if absent),
/// leaving other keys and comments as they were.
void update_config_alpha(const std::string& path, double alpha);

}  // namespace psycodec
