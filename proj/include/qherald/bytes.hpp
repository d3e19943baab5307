// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_BYTES_HPP_
#define QHERALD_BYTES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qherald/errors.hpp"

namespace qherald {

using Bytes = std::vector<std::uint8_t>;

// Appends `width` bytes of `value` in network (big-endian) order.
inline void put_be(Bytes& out, std::uint64_t value, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    out.push_back(
        static_cast<std::uint8_t>(value >> (8 * (width - 1 - i)) & 0xFF));
  }
}

inline void put_u8(Bytes& out, std::uint8_t v) { put_be(out, v, 1); }
inline void put_u16(Bytes& out, std::uint16_t v) { put_be(out, v, 2); }
inline void put_u32(Bytes& out, std::uint32_t v) { put_be(out, v, 4); }
inline void put_u64(Bytes& out, std::uint64_t v) { put_be(out, v, 8); }

// Sequential big-endian reader over a byte span. Throws DecodeError on
// underrun rather than returning sentinel values.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t take_be(std::size_t width) {
    if (pos_ + width > data_.size()) {
      throw DecodeError(DecodeError::Kind::kTruncated,
                        "need " + std::to_string(width) + " bytes at offset " +
                            std::to_string(pos_) + ", have " +
                            std::to_string(data_.size() - pos_));
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < width; ++i) {
      value = value << 8 | data_[pos_ + i];
    }
    pos_ += width;
    return value;
  }

  std::uint8_t take_u8() { return static_cast<std::uint8_t>(take_be(1)); }
  std::uint16_t take_u16() { return static_cast<std::uint16_t>(take_be(2)); }
  std::uint32_t take_u32() { return static_cast<std::uint32_t>(take_be(4)); }
  std::uint64_t take_u64() { return take_be(8); }

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// FNV-1a over a byte string; used for scenario digests.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::uint8_t byte : data) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t fnv1a64(const std::string& text) {
  return fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Fixed-width lowercase hex, suitable for digests in reports.
inline std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

}  // namespace qherald

#endif  // QHERALD_BYTES_HPP_
