#include "psycodec/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bytes.hpp"
#include "psycodec/error.hpp"

namespace psycodec::container {

namespace {

using Reason = FormatError::Reason;

[[noreturn]] void truncated() { throw FormatError(Reason::Truncated, "stream truncated"); }
[[noreturn]] void truncated_payload() { throw FormatError(Reason::Truncated, "payload truncated"); }

constexpr std::size_t kCrcOffset = kHeaderSize - 4;

codec::StreamHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError(Reason::Truncated, "stream shorter than its magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(Reason::BadMagic, "not a PSC1 stream");
  if (bytes.size() < 5) throw FormatError(Reason::Truncated, "stream truncated before the version");
  if (bytes[4] != codec::kStreamVersion)
    throw FormatError(Reason::UnknownVersion, "unknown stream version " + std::to_string(bytes[4]));
  if (bytes.size() < kHeaderSize) throw FormatError(Reason::Truncated, "stream header truncated");

  detail::ByteReader r(bytes.subspan(0, kHeaderSize), &truncated);
  r.bytes(4);
  codec::StreamHeader h;
  h.version = r.u8();
  h.sample_rate = r.u32();
  h.num_samples = r.u64();
  h.chunk_size = r.u16();
  h.alpha = r.f32();
  h.a_t = r.f32();
  h.a_f = r.f32();
  h.window_a = r.f32();
  const std::uint8_t lock = r.u8();
  h.flags = r.u8();
  h.seed = r.u64();
  h.key_length = r.u32();
  h.payload_length = r.u64();
  const std::uint32_t stored_crc = r.u32();
  if (stored_crc != crc32(bytes.subspan(0, kCrcOffset)))
    throw FormatError(Reason::CrcMismatch, "header CRC mismatch");

  if (lock > static_cast<std::uint8_t>(codec::LockVariant::Zero))
    throw FormatError(Reason::Malformed, "unknown lock variant " + std::to_string(lock));
  h.lock_variant = static_cast<codec::LockVariant>(lock);
  if (h.flags & ~(codec::kFlagNoisy | codec::kFlagDither))
    throw FormatError(Reason::Unsupported, "unknown header flags");
  if (h.sample_rate == 0 || h.num_samples == 0) throw FormatError(Reason::Malformed, "empty stream");
  if (h.chunk_size < 2 || h.chunk_size % 2 != 0) throw FormatError(Reason::Malformed, "bad chunk size");
  if (!(h.window_a > 0.0f) || !(h.alpha > 0.0f) || !(h.a_t > 0.0f) || !(h.a_f > 0.0f))
    throw FormatError(Reason::Malformed, "non-positive masking parameter");
  return h;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    c = ::crc32(c, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> raw) {
  uLongf cap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(cap);
  if (compress2(out.data(), &cap, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) != Z_OK)
    fail(ErrorKind::Numerical, "deflate failed");
  out.resize(cap);
  return out;
}

std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> packed) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) fail(ErrorKind::Numerical, "inflate init failed");
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  zs.next_in = const_cast<Bytef*>(packed.data());
  zs.avail_in = static_cast<uInt>(packed.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf;
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      if (rc == Z_BUF_ERROR) throw FormatError(Reason::Truncated, "compressed block truncated");
      throw FormatError(Reason::Malformed, "compressed block is corrupt");
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw FormatError(Reason::Malformed, "trailing bytes after compressed block");
  return out;
}

std::vector<std::uint8_t> encode_payload(const std::vector<std::vector<std::int32_t>>& chunks) {
  if (chunks.empty()) return {};
  detail::ByteWriter w;
  for (const auto& c : chunks)
    for (const auto v : c) w.varint(detail::zigzag(v));
  return deflate_bytes(w.data());
}

std::vector<std::vector<std::int32_t>> decode_payload(std::span<const std::uint8_t> bytes,
                                                      std::size_t chunk_count,
                                                      std::size_t chunk_size) {
  if (chunk_count == 0) {
    if (!bytes.empty()) throw FormatError(Reason::Malformed, "unexpected payload");
    return {};
  }
  const auto raw = inflate_bytes(bytes);
  if (raw.size() / chunk_size < chunk_count) truncated_payload();
  detail::ByteReader r(raw, &truncated_payload);
  std::vector<std::vector<std::int32_t>> chunks(chunk_count, std::vector<std::int32_t>(chunk_size));
  for (auto& c : chunks)
    for (auto& v : c) {
      const std::int64_t x = detail::unzigzag(r.varint());
      if (x > codec::kCoefficientLimit || x < -codec::kCoefficientLimit)
        throw FormatError(Reason::Malformed, "coefficient out of range");
      v = static_cast<std::int32_t>(x);
    }
  if (r.remaining() != 0) throw FormatError(Reason::Malformed, "trailing payload bytes");
  return chunks;
}

std::vector<std::uint8_t> write_stream(const codec::EncodedStream& stream) {
  const auto key = codec::serialize_key(stream.key);
  const auto payload = encode_payload(stream.chunks);
  const codec::StreamHeader& h = stream.header;
  detail::ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u8(h.version);
  w.u32(h.sample_rate);
  w.u64(h.num_samples);
  w.u16(h.chunk_size);
  w.f32(h.alpha);
  w.f32(h.a_t);
  w.f32(h.a_f);
  w.f32(h.window_a);
  w.u8(static_cast<std::uint8_t>(h.lock_variant));
  w.u8(h.flags);
  w.u64(h.seed);
  w.u32(static_cast<std::uint32_t>(key.size()));
  w.u64(payload.size());
  w.u32(crc32(w.data()));
  w.bytes(key);
  w.bytes(payload);
  return std::move(w.data());
}

codec::StreamHeader read_header(std::span<const std::uint8_t> bytes) { return parse_header(bytes); }

codec::EncodedStream read_stream(std::span<const std::uint8_t> bytes) {
  codec::EncodedStream s;
  s.header = parse_header(bytes);
  const std::size_t body = bytes.size() - kHeaderSize;
  if (s.header.key_length > body || s.header.payload_length > body - s.header.key_length)
    throw FormatError(Reason::Truncated, "stream body truncated");
  if (s.header.key_length + s.header.payload_length != body)
    throw FormatError(Reason::Malformed, "trailing bytes after payload");
  const auto key = bytes.subspan(kHeaderSize, s.header.key_length);
  const auto payload = bytes.subspan(kHeaderSize + s.header.key_length,
                                     static_cast<std::size_t>(s.header.payload_length));
  s.key = codec::deserialize_key(key);
  const std::size_t count = s.header.noisy() ? 0 : s.header.chunk_count();
  s.chunks = decode_payload(payload, count, s.header.chunk_size);
  // Canonical in-memory form: the writer's length fields are derived.
  s.header.key_length = 0;
  s.header.payload_length = 0;
  return s;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "error reading '" + path + "'");
  return out;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

}  // namespace psycodec::container
