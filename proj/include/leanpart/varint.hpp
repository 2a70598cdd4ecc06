/*******************************************************************************
 * Byte-aligned VarInt codec (7 payload bits plus a continuation bit per
 * byte) and the zigzag mapping for signed values.
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace leanpart {

class MalformedEncoding : public std::runtime_error {
public:
  MalformedEncoding(const std::string &what, const std::size_t byte_offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(byte_offset)),
        offset(byte_offset) {}

  std::size_t offset;
};

constexpr int kMaxVarIntBytes = 10;

// Little-endian base-128 groups, continuation bit set on all but the final
// byte; always the minimal length.
template <typename Out>
void varint_encode(std::uint64_t value, Out &out) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

inline int varint_length(std::uint64_t value) {
  int len = 1;
  while (value >= 0x80) {
    value >>= 7;
    ++len;
  }
  return len;
}

struct VarIntResult {
  std::uint64_t value;
  int consumed;
};

// Decodes one VarInt starting at data[pos]; `size` is the total readable
// byte count. Throws MalformedEncoding for truncated or over-long chains.
inline VarIntResult varint_decode(const std::uint8_t *data, const std::size_t size, const std::size_t pos) {
  std::uint64_t value = 0;
  int shift = 0;
  for (int i = 0; i < kMaxVarIntBytes; ++i) {
    if (pos + i >= size) {
      throw MalformedEncoding("truncated VarInt", pos + i);
    }
    const std::uint8_t byte = data[pos + i];
    value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) {
      return {value, i + 1};
    }
    shift += 7;
  }
  throw MalformedEncoding("VarInt continuation chain exceeds 10 bytes", pos);
}

constexpr std::uint64_t zigzag_encode(const std::int64_t value) {
  return (static_cast<std::uint64_t>(value) << 1) ^ static_cast<std::uint64_t>(value >> 63);
}

constexpr std::int64_t zigzag_decode(const std::uint64_t value) {
  return static_cast<std::int64_t>(value >> 1) ^ -static_cast<std::int64_t>(value & 1);
}

} // namespace leanpart
