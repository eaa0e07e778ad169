#include "rtva/rtp.hpp"

#include "rtva/errors.hpp"

namespace rtva::rtp {

std::vector<uint8_t> serialize(const RtpPacket& packet) {
    const RtpHeader& h = packet.header;
    std::vector<uint8_t> out;
    out.reserve(kHeaderSize + packet.payload.size());
    out.push_back((uint8_t)((h.version << 6) | (h.padding ? 0x20 : 0) |
                            (h.extension ? 0x10 : 0) | (h.csrc_count & 0x0f)));
    out.push_back((uint8_t)((h.marker ? 0x80 : 0) | (h.payload_type & 0x7f)));
    out.push_back((uint8_t)(h.sequence_number >> 8));
    out.push_back((uint8_t)(h.sequence_number & 0xff));
    out.push_back((uint8_t)(h.timestamp >> 24));
    out.push_back((uint8_t)((h.timestamp >> 16) & 0xff));
    out.push_back((uint8_t)((h.timestamp >> 8) & 0xff));
    out.push_back((uint8_t)(h.timestamp & 0xff));
    out.push_back((uint8_t)(h.ssrc >> 24));
    out.push_back((uint8_t)((h.ssrc >> 16) & 0xff));
    out.push_back((uint8_t)((h.ssrc >> 8) & 0xff));
    out.push_back((uint8_t)(h.ssrc & 0xff));
    out.insert(out.end(), packet.payload.begin(), packet.payload.end());
    return out;
}

RtpPacket parse(std::span<const uint8_t> bytes) {
    if (bytes.size() < kHeaderSize + 1) {
        throw TruncationError("rtp: packet shorter than header plus payload");
    }
    RtpPacket pkt;
    RtpHeader& h = pkt.header;
    h.version = (uint8_t)(bytes[0] >> 6);
    if (h.version != kVersion) {
        throw ProtocolError("rtp: unsupported version " + std::to_string(h.version));
    }
    h.padding = (bytes[0] & 0x20) != 0;
    h.extension = (bytes[0] & 0x10) != 0;
    h.csrc_count = (uint8_t)(bytes[0] & 0x0f);
    if (h.csrc_count != 0) {
        throw ProtocolError("rtp: CSRC lists are not used by this system");
    }
    h.marker = (bytes[1] & 0x80) != 0;
    h.payload_type = (uint8_t)(bytes[1] & 0x7f);
    h.sequence_number = (uint16_t)((bytes[2] << 8) | bytes[3]);
    h.timestamp = ((uint32_t)bytes[4] << 24) | ((uint32_t)bytes[5] << 16) |
                  ((uint32_t)bytes[6] << 8) | (uint32_t)bytes[7];
    h.ssrc = ((uint32_t)bytes[8] << 24) | ((uint32_t)bytes[9] << 16) |
             ((uint32_t)bytes[10] << 8) | (uint32_t)bytes[11];
    pkt.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
    return pkt;
}

}  // namespace rtva::rtp
