#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtva/rtp.hpp"

namespace rtva::net {

struct Endpoint {
    std::string host = "127.0.0.1";
    uint16_t port = 0;

    static Endpoint parse(const std::string& hostport);  // "ip:port"
    std::string to_string() const;
    bool operator==(const Endpoint&) const = default;
};

// Thin RAII wrapper over an IPv4 UDP socket.
class UdpSocket {
public:
    UdpSocket();
    ~UdpSocket();
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&& other) noexcept;
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    // port 0 picks an ephemeral port. IoError if the port is taken.
    void bind(uint16_t port);
    uint16_t local_port() const;

    void send_to(const Endpoint& dest, std::span<const uint8_t> bytes);

    struct Datagram {
        std::vector<uint8_t> bytes;
        Endpoint from;
    };
    // Blocks up to timeout_ms; nullopt on timeout.
    std::optional<Datagram> receive(int timeout_ms);

private:
    int fd_ = -1;
};

// Assigns sequence numbers, timestamps and the SSRC to outgoing payloads.
// Initial sequence number and SSRC are drawn from the seeded generator so
// runs are reproducible; timestamps advance by 320 per packet.
class Packetizer {
public:
    Packetizer(uint8_t payload_type, uint32_t seed);

    rtp::RtpPacket packetize(std::vector<uint8_t> payload, bool marker = false);
    uint32_t ssrc() const { return ssrc_; }
    uint16_t next_sequence() const { return next_seq_; }

private:
    uint8_t payload_type_;
    uint16_t next_seq_;
    uint32_t next_timestamp_ = 0;
    uint32_t ssrc_;
};

struct JitterEvent {
    enum class Kind { packet, loss };
    Kind kind = Kind::packet;
    rtp::RtpPacket packet;   // set when kind == packet
    uint16_t sequence = 0;   // the surrendered sequence when kind == loss
};

// Reorders packets by sequence number within a fixed depth. A gap older than
// the depth is surrendered as a loss event; duplicates and late arrivals are
// dropped. Wraparound safe.
class JitterBuffer {
public:
    explicit JitterBuffer(int depth_frames = 3);

    std::vector<JitterEvent> push(rtp::RtpPacket packet);
    // Drains whatever is still buffered, emitting losses for the gaps.
    std::vector<JitterEvent> flush();
    void reset();

    size_t duplicates_dropped() const { return duplicates_; }
    size_t late_dropped() const { return late_; }

private:
    void drain(std::vector<JitterEvent>& events);
    int max_distance() const;

    int depth_;
    bool primed_ = false;
    uint16_t next_expected_ = 0;
    std::unordered_map<uint16_t, rtp::RtpPacket> pending_;
    size_t duplicates_ = 0;
    size_t late_ = 0;
};

// Absolute-schedule pacer: tick() sleeps until the next multiple of the
// interval from construction time, so per-iteration jitter does not drift.
class Pacer {
public:
    explicit Pacer(int interval_ms);
    void tick();

private:
    std::chrono::steady_clock::time_point next_;
    std::chrono::milliseconds interval_;
};

struct SendReport {
    size_t packets_sent = 0;
    size_t bytes_sent = 0;
    size_t send_errors = 0;
    double elapsed_ms = 0.0;
};

// Serializes and sends packets at fixed intervals (default one per 20 ms).
// Send failures are counted and the stream continues with the next packet.
SendReport paced_send(UdpSocket& socket, const Endpoint& dest,
                      std::span<const rtp::RtpPacket> packets, int interval_ms = 20);

struct ReceiveStats {
    size_t datagrams = 0;
    size_t malformed = 0;
};

// Parses and reorders incoming datagrams until the socket stays idle for
// idle_timeout_ms. Malformed datagrams are counted and skipped.
std::vector<JitterEvent> receive_ordered(UdpSocket& socket, JitterBuffer& jb,
                                         int idle_timeout_ms,
                                         ReceiveStats* stats = nullptr);

}  // namespace rtva::net
