#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psycodec/codec.hpp"

namespace psycodec::container {

inline constexpr char kMagic[4] = {'P', 'S', 'C', '1'};
/// magic 4 + fields 53 + crc 4.
inline constexpr std::size_t kHeaderSize = 61;

/// Serializes a stream: header (little-endian, CRC32 over everything
/// before the CRC), deflated key, deflated zigzag-varint payload.
std::vector<std::uint8_t> write_stream(const codec::EncodedStream& stream);

/// Inverse of write_stream. Magic and version are checked before anything
/// else; truncation, CRC failure and unknown versions raise distinct
/// FormatError reasons.
codec::EncodedStream read_stream(std::span<const std::uint8_t> bytes);

/// Header alone, for inspection.
codec::StreamHeader read_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_payload(const std::vector<std::vector<std::int32_t>>& chunks);
std::vector<std::vector<std::int32_t>> decode_payload(std::span<const std::uint8_t> bytes,
                                                      std::size_t chunk_count,
                                                      std::size_t chunk_size);

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> raw);
std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> packed);
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace psycodec::container
