#pragma once

// Length-prefixed binary framing and payload layouts. All wire integers are
// big-endian; query bits are packed row-major, MSB-first, zero-padded.
//
//   frame:  "SPSR" | version 0x01 | msg_type u8 | payload_len u32 | payload
//   QUERY:  M u16 | K u16 | L u16 | q u32 | ceil(M*K*L / 8) bit-packed bytes
//   ANSWER: M u16 | M entries, u32 each, every entry < q
//   ERROR:  code u16 | UTF-8 message
//
// Frames with unknown magic, version, or msg_type are rejected before any
// payload parsing. Error codes: 0x0001 shape mismatch, 0x0002 bad frame,
// 0x0003 unsupported version, 0x0004 internal.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spssr/errors.hpp"
#include "spssr/field.hpp"
#include "spssr/scheme.hpp"

namespace spssr::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 4> kMagic{'S', 'P', 'S', 'R'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 10;
// Generous cap; a hostile length prefix must not drive allocation.
inline constexpr std::uint32_t kMaxPayload = 1u << 26;

enum class MsgType : std::uint8_t {
  query = 0x01,
  answer = 0x02,
  error = 0x03,
};

inline constexpr std::uint16_t kErrShapeMismatch = 0x0001;
inline constexpr std::uint16_t kErrBadFrame = 0x0002;
inline constexpr std::uint16_t kErrUnsupportedVersion = 0x0003;
inline constexpr std::uint16_t kErrInternal = 0x0004;

struct Frame {
  MsgType type;
  Bytes payload;
};

namespace detail {

inline void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint16_t get_u16(const Bytes& in, std::size_t at) {
  return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}

inline std::uint32_t get_u32(const Bytes& in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

}  // namespace detail

inline Bytes encode_frame(MsgType type, const Bytes& payload) {
  Bytes out(kHeaderSize + payload.size());
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(type);
  const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
  out[6] = static_cast<std::uint8_t>(len >> 24);
  out[7] = static_cast<std::uint8_t>(len >> 16);
  out[8] = static_cast<std::uint8_t>(len >> 8);
  out[9] = static_cast<std::uint8_t>(len);
  std::copy(payload.begin(), payload.end(), out.begin() + kHeaderSize);
  return out;
}

/// Validates a frame header; returns (msg_type, payload_len).
inline std::pair<MsgType, std::uint32_t> decode_header(
    const std::array<std::uint8_t, kHeaderSize>& header) {
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (header[i] != kMagic[i]) {
      throw WireError(kErrBadFrame, "bad magic");
    }
  }
  if (header[4] != kVersion) {
    throw WireError(kErrUnsupportedVersion,
                    "unsupported version " + std::to_string(header[4]));
  }
  const std::uint8_t t = header[5];
  if (t < 0x01 || t > 0x03) {
    throw WireError(kErrBadFrame, "unknown message type " + std::to_string(t));
  }
  std::uint32_t len = (std::uint32_t{header[6]} << 24) |
                      (std::uint32_t{header[7]} << 16) |
                      (std::uint32_t{header[8]} << 8) | std::uint32_t{header[9]};
  if (len > kMaxPayload) {
    throw WireError(kErrBadFrame, "payload length " + std::to_string(len) +
                                      " exceeds limit");
  }
  return {static_cast<MsgType>(t), len};
}

inline Frame decode_frame(const Bytes& buffer) {
  if (buffer.size() < kHeaderSize) {
    throw WireError(kErrBadFrame, "truncated frame header");
  }
  std::array<std::uint8_t, kHeaderSize> header;
  std::copy_n(buffer.begin(), kHeaderSize, header.begin());
  auto [type, len] = decode_header(header);
  if (buffer.size() != kHeaderSize + len) {
    throw WireError(kErrBadFrame, "payload length mismatch");
  }
  return Frame{type, Bytes(buffer.begin() + kHeaderSize, buffer.end())};
}

// ---------------------------------------------------------------------------
// QUERY payload

inline Bytes encode_query_payload(const QueryMatrix& q,
                                  std::uint32_t field_order) {
  if (q.rows() > 0xffff || q.messages() > 0xffff || q.subpackets() > 0xffff) {
    throw ShapeMismatch("query dimensions exceed the 16-bit wire fields");
  }
  Bytes out;
  detail::put_u16(out, static_cast<std::uint16_t>(q.rows()));
  detail::put_u16(out, static_cast<std::uint16_t>(q.messages()));
  detail::put_u16(out, static_cast<std::uint16_t>(q.subpackets()));
  detail::put_u32(out, field_order);
  const auto bits = q.packed();
  out.insert(out.end(), bits.begin(), bits.end());
  return out;
}

struct DecodedQuery {
  std::uint32_t field_order;
  QueryMatrix matrix;
};

inline DecodedQuery decode_query_payload(const Bytes& payload) {
  if (payload.size() < 10) {
    throw WireError(kErrBadFrame, "query payload too short");
  }
  const int rows = detail::get_u16(payload, 0);
  const int messages = detail::get_u16(payload, 2);
  const int subpackets = detail::get_u16(payload, 4);
  const std::uint32_t field_order = detail::get_u32(payload, 6);
  if (rows < 1 || messages < 1 || subpackets < 1) {
    throw WireError(kErrBadFrame, "query payload with zero dimension");
  }
  const long bit_count = static_cast<long>(rows) * messages * subpackets;
  const std::size_t expected = 10 + (bit_count + 7) / 8;
  if (payload.size() != expected) {
    throw WireError(kErrBadFrame, "query payload size mismatch");
  }

  QueryMatrix q(rows, messages, subpackets);
  for (long b = 0; b < bit_count; ++b) {
    const std::uint8_t byte = payload[10 + b / 8];
    q.set_bit_at(b, (byte >> (7 - b % 8)) & 1);
  }
  // Padding bits must be zero.
  const long padded = static_cast<long>((bit_count + 7) / 8) * 8;
  for (long b = bit_count; b < padded; ++b) {
    if ((payload[10 + b / 8] >> (7 - b % 8)) & 1) {
      throw WireError(kErrBadFrame, "nonzero padding bits");
    }
  }
  return DecodedQuery{field_order, std::move(q)};
}

// ---------------------------------------------------------------------------
// ANSWER payload

inline Bytes encode_answer_payload(const AnswerVector& answer) {
  if (answer.size() > 0xffff) {
    throw ShapeMismatch("answer length exceeds the 16-bit wire field");
  }
  Bytes out;
  detail::put_u16(out, static_cast<std::uint16_t>(answer.size()));
  for (const auto& e : answer) detail::put_u32(out, e.value());
  return out;
}

inline std::vector<std::uint32_t> decode_answer_payload(const Bytes& payload,
                                                        std::uint32_t field_order) {
  if (payload.size() < 2) {
    throw WireError(kErrBadFrame, "answer payload too short");
  }
  const int entries = detail::get_u16(payload, 0);
  if (payload.size() != 2 + static_cast<std::size_t>(entries) * 4) {
    throw WireError(kErrBadFrame, "answer payload size mismatch");
  }
  std::vector<std::uint32_t> values;
  values.reserve(entries);
  for (int m = 0; m < entries; ++m) {
    const std::uint32_t v = detail::get_u32(payload, 2 + 4 * m);
    if (v >= field_order) {
      throw WireError(kErrBadFrame, "answer entry " + std::to_string(v) +
                                        " not below field order");
    }
    values.push_back(v);
  }
  return values;
}

// ---------------------------------------------------------------------------
// ERROR payload

inline Bytes encode_error_payload(std::uint16_t code, const std::string& message) {
  Bytes out;
  detail::put_u16(out, code);
  out.insert(out.end(), message.begin(), message.end());
  return out;
}

inline std::pair<std::uint16_t, std::string> decode_error_payload(
    const Bytes& payload) {
  if (payload.size() < 2) {
    throw WireError(kErrBadFrame, "error payload too short");
  }
  return {detail::get_u16(payload, 0),
          std::string(payload.begin() + 2, payload.end())};
}

}  // namespace spssr::wire
