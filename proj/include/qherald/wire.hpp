// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QHERALD_WIRE_HPP_
#define QHERALD_WIRE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "qherald/bytes.hpp"
#include "qherald/errors.hpp"

namespace qherald {

// Control-plane message type tags (first byte on the wire).
inline constexpr std::uint8_t kMsgTimer = 0x01;
inline constexpr std::uint8_t kMsgGen = 0x02;
inline constexpr std::uint8_t kMsgMpReply = 0x03;
inline constexpr std::uint8_t kMsgDetector = 0x04;

// Attempt outcomes, shared by detector reports and midpoint replies.
inline constexpr std::uint8_t kOutcomeFail = 0;
inline constexpr std::uint8_t kOutcomeSuccess = 1;
inline constexpr std::uint8_t kOutcomeError = 2;

inline const char* outcome_name(std::uint8_t outcome) {
  switch (outcome) {
    case kOutcomeFail: return "FAIL";
    case kOutcomeSuccess: return "SUCCESS";
    case kOutcomeError: return "ERROR";
    default: return "INVALID";
  }
}

// Timer tick delivered to a node pipeline on its CPU port. 5 bytes.
struct TimerMsg {
  std::uint32_t cycle = 0;
  bool operator==(const TimerMsg&) const = default;
};

// Attempt announcement from a node to the midpoint. 9 bytes.
struct GenMsg {
  std::uint32_t cycle = 0;
  std::uint16_t qubit_slot = 0;
  std::uint16_t attempt_params = 0;
  bool operator==(const GenMsg&) const = default;
};

// Midpoint verdict multicast back to both nodes. 10 bytes.
// pair_seq is zero unless outcome is SUCCESS.
struct MpReplyMsg {
  std::uint8_t outcome = kOutcomeFail;
  std::uint32_t cycle = 0;
  std::uint32_t pair_seq = 0;
  bool operator==(const MpReplyMsg&) const = default;
};

// Measurement report injected into the midpoint pipeline when a detection
// bin closes. 8 bytes.
struct DetectorMsg {
  std::uint8_t outcome = kOutcomeFail;
  std::uint16_t det_id = 0;
  std::uint32_t bin = 0;
  bool operator==(const DetectorMsg&) const = default;
};

using WireMessage = std::variant<TimerMsg, GenMsg, MpReplyMsg, DetectorMsg>;

inline Bytes encode(const TimerMsg& m) {
  Bytes out;
  put_u8(out, kMsgTimer);
  put_u32(out, m.cycle);
  return out;
}

inline Bytes encode(const GenMsg& m) {
  Bytes out;
  put_u8(out, kMsgGen);
  put_u32(out, m.cycle);
  put_u16(out, m.qubit_slot);
  put_u16(out, m.attempt_params);
  return out;
}

inline Bytes encode(const MpReplyMsg& m) {
  Bytes out;
  put_u8(out, kMsgMpReply);
  put_u8(out, m.outcome);
  put_u32(out, m.cycle);
  put_u32(out, m.pair_seq);
  return out;
}

inline Bytes encode(const DetectorMsg& m) {
  Bytes out;
  put_u8(out, kMsgDetector);
  put_u8(out, m.outcome);
  put_u16(out, m.det_id);
  put_u32(out, m.bin);
  return out;
}

inline Bytes encode(const WireMessage& m) {
  return std::visit([](const auto& inner) { return encode(inner); }, m);
}

// Decodes one complete message. Rejects unknown type tags, short buffers,
// trailing bytes, and out-of-range outcome codes.
inline WireMessage decode(std::span<const std::uint8_t> data) {
  ByteReader reader(data);
  const std::uint8_t type = reader.take_u8();
  WireMessage msg;
  switch (type) {
    case kMsgTimer: {
      TimerMsg m;
      m.cycle = reader.take_u32();
      msg = m;
      break;
    }
    case kMsgGen: {
      GenMsg m;
      m.cycle = reader.take_u32();
      m.qubit_slot = reader.take_u16();
      m.attempt_params = reader.take_u16();
      msg = m;
      break;
    }
    case kMsgMpReply: {
      MpReplyMsg m;
      m.outcome = reader.take_u8();
      m.cycle = reader.take_u32();
      m.pair_seq = reader.take_u32();
      if (m.outcome > kOutcomeError) {
        throw DecodeError(DecodeError::Kind::kBadValue,
                          "reply outcome " + std::to_string(m.outcome));
      }
      msg = m;
      break;
    }
    case kMsgDetector: {
      DetectorMsg m;
      m.outcome = reader.take_u8();
      m.det_id = reader.take_u16();
      m.bin = reader.take_u32();
      if (m.outcome > kOutcomeSuccess) {
        throw DecodeError(DecodeError::Kind::kBadValue,
                          "detector outcome " + std::to_string(m.outcome));
      }
      msg = m;
      break;
    }
    default:
      throw DecodeError(DecodeError::Kind::kUnknownType,
                        "message type 0x" + to_hex(type).substr(14));
  }
  if (reader.remaining() != 0) {
    throw DecodeError(DecodeError::Kind::kBadValue,
                      std::to_string(reader.remaining()) + " trailing bytes");
  }
  return msg;
}

}  // namespace qherald

#endif  // QHERALD_WIRE_HPP_
