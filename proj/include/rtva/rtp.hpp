#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rtva::rtp {

inline constexpr size_t kHeaderSize = 12;
inline constexpr uint8_t kVersion = 2;
// Dynamic payload types; the wire format does not depend on the values.
inline constexpr uint8_t kPayloadTypeOpus = 111;
inline constexpr uint8_t kPayloadTypePassthrough = 96;
// One 20 ms frame at 16 kHz per packet.
inline constexpr uint32_t kTimestampPerPacket = 320;

struct RtpHeader {
    uint8_t version = kVersion;
    bool padding = false;
    bool extension = false;
    uint8_t csrc_count = 0;  // always 0 in this system
    bool marker = false;
    uint8_t payload_type = kPayloadTypeOpus;  // 7 bits
    uint16_t sequence_number = 0;
    uint32_t timestamp = 0;
    uint32_t ssrc = 0;

    bool operator==(const RtpHeader&) const = default;
};

struct RtpPacket {
    RtpHeader header;
    std::vector<uint8_t> payload;  // nonempty

    bool operator==(const RtpPacket&) const = default;
};

// 12-byte header, network byte order:
//   byte0 = V<<6 | P<<5 | X<<4 | CC, byte1 = M<<7 | PT,
//   then sequence number (16), timestamp (32), SSRC (32).
std::vector<uint8_t> serialize(const RtpPacket& packet);

// Inverse of serialize. Throws TruncationError for inputs shorter than 13
// bytes (header plus a nonempty payload) and ProtocolError for version != 2
// or a nonzero CSRC count.
RtpPacket parse(std::span<const uint8_t> bytes);

// Signed distance a-b in sequence space (mod 2^16), positive when a is ahead.
inline int seq_distance(uint16_t a, uint16_t b) { return (int16_t)(uint16_t)(a - b); }

}  // namespace rtva::rtp
