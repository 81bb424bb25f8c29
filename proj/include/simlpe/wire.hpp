#pragma once

// Little-endian byte packing and the FNV-1a checksum shared by the motion and
// checkpoint file formats, plus a bounds-checked cursor for parsing.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

#include "simlpe/error.hpp"

namespace simlpe::wire {

inline void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Cursor {
 public:
  Cursor(const std::string& buf, std::string what)
      : buf_(buf), what_(std::move(what)) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return buf_.size() - pos_; }

  void need(size_t n) const {
    if (remaining() < n)
      throw FormatError(FormatError::Kind::Truncated,
                        what_ + ": truncated, need " + std::to_string(n) +
                            " more bytes at offset " + std::to_string(pos_));
  }

  void read_bytes(void* out, size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }

  uint16_t read_u16() {
    unsigned char b[2];
    read_bytes(b, 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }

  uint32_t read_u32() {
    unsigned char b[4];
    read_bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }

  uint64_t read_u64() {
    uint64_t v = 0;
    unsigned char b[8];
    read_bytes(b, 8);
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }

  float read_f32() {
    const uint32_t bits = read_u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

 private:
  const std::string& buf_;
  std::string what_;
  size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace simlpe::wire
