#include "rtva/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <random>
#include <thread>

#include "rtva/errors.hpp"

namespace rtva::net {

namespace {

sockaddr_in resolve(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw IoError("cannot resolve host: " + ep.host);
    }
    addr.sin_addr = ((sockaddr_in*)res->ai_addr)->sin_addr;
    freeaddrinfo(res);
    return addr;
}

}  // namespace

Endpoint Endpoint::parse(const std::string& hostport) {
    const auto colon = hostport.rfind(':');
    if (colon == std::string::npos || colon + 1 >= hostport.size()) {
        throw ParamError("endpoint must be host:port, got: " + hostport);
    }
    Endpoint ep;
    ep.host = hostport.substr(0, colon);
    try {
        const int port = std::stoi(hostport.substr(colon + 1));
        if (port < 1 || port > 65535) throw std::out_of_range("port");
        ep.port = (uint16_t)port;
    } catch (const std::exception&) {
        throw ParamError("bad port in endpoint: " + hostport);
    }
    return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

UdpSocket::UdpSocket() {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw IoError("cannot create UDP socket");
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void UdpSocket::bind(uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, (sockaddr*)&addr, sizeof(addr)) != 0) {
        throw IoError("cannot bind UDP port " + std::to_string(port) + ": " +
                      std::strerror(errno));
    }
}

uint16_t UdpSocket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, (sockaddr*)&addr, &len) != 0) {
        throw IoError("getsockname failed");
    }
    return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const Endpoint& dest, std::span<const uint8_t> bytes) {
    const sockaddr_in addr = resolve(dest);
    const ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0, (const sockaddr*)&addr,
                               sizeof(addr));
    if (n < 0 || (size_t)n != bytes.size()) {
        throw IoError(std::string("sendto failed: ") + std::strerror(errno));
    }
}

std::optional<UdpSocket::Datagram> UdpSocket::receive(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, timeout_ms);
    if (r < 0) throw IoError(std::string("poll failed: ") + std::strerror(errno));
    if (r == 0) return std::nullopt;

    Datagram dg;
    dg.bytes.resize(2048);
    sockaddr_in from{};
    socklen_t from_len = sizeof(from);
    const ssize_t n = ::recvfrom(fd_, dg.bytes.data(), dg.bytes.size(), 0,
                                 (sockaddr*)&from, &from_len);
    if (n < 0) throw IoError(std::string("recvfrom failed: ") + std::strerror(errno));
    dg.bytes.resize((size_t)n);
    char buf[INET_ADDRSTRLEN] = {0};
    inet_ntop(AF_INET, &from.sin_addr, buf, sizeof(buf));
    dg.from = Endpoint{buf, ntohs(from.sin_port)};
    return dg;
}

Packetizer::Packetizer(uint8_t payload_type, uint32_t seed) : payload_type_(payload_type) {
    std::mt19937 rng(seed);
    next_seq_ = (uint16_t)rng();
    ssrc_ = rng();
}

rtp::RtpPacket Packetizer::packetize(std::vector<uint8_t> payload, bool marker) {
    rtp::RtpPacket pkt;
    pkt.header.payload_type = payload_type_;
    pkt.header.marker = marker;
    pkt.header.sequence_number = next_seq_++;
    pkt.header.timestamp = next_timestamp_;
    pkt.header.ssrc = ssrc_;
    next_timestamp_ += rtp::kTimestampPerPacket;
    pkt.payload = std::move(payload);
    return pkt;
}

JitterBuffer::JitterBuffer(int depth_frames) : depth_(depth_frames) {
    if (depth_frames < 1) throw ParamError("jitter depth must be >= 1");
}

void JitterBuffer::reset() {
    primed_ = false;
    next_expected_ = 0;
    pending_.clear();
}

int JitterBuffer::max_distance() const {
    int max = 0;
    for (const auto& [seq, _] : pending_) {
        max = std::max(max, rtp::seq_distance(seq, next_expected_));
    }
    return max;
}

void JitterBuffer::drain(std::vector<JitterEvent>& events) {
    for (auto it = pending_.find(next_expected_); it != pending_.end();
         it = pending_.find(next_expected_)) {
        events.push_back({JitterEvent::Kind::packet, std::move(it->second), 0});
        pending_.erase(it);
        ++next_expected_;
    }
}

std::vector<JitterEvent> JitterBuffer::push(rtp::RtpPacket packet) {
    std::vector<JitterEvent> events;
    const uint16_t seq = packet.header.sequence_number;
    if (!primed_) {
        primed_ = true;
        next_expected_ = seq;
    }

    const int dist = rtp::seq_distance(seq, next_expected_);
    if (dist < 0) {
        ++late_;  // already emitted or surrendered
        return events;
    }
    if (dist == 0) {
        events.push_back({JitterEvent::Kind::packet, std::move(packet), 0});
        ++next_expected_;
        drain(events);
    } else if (!pending_.emplace(seq, std::move(packet)).second) {
        ++duplicates_;
        return events;
    }

    // Surrender gaps once the buffered span exceeds the depth.
    while (!pending_.empty() && max_distance() >= depth_) {
        events.push_back({JitterEvent::Kind::loss, {}, next_expected_});
        ++next_expected_;
        drain(events);
    }
    return events;
}

std::vector<JitterEvent> JitterBuffer::flush() {
    std::vector<JitterEvent> events;
    while (!pending_.empty()) {
        auto it = pending_.find(next_expected_);
        if (it != pending_.end()) {
            events.push_back({JitterEvent::Kind::packet, std::move(it->second), 0});
            pending_.erase(it);
        } else {
            events.push_back({JitterEvent::Kind::loss, {}, next_expected_});
        }
        ++next_expected_;
    }
    return events;
}

Pacer::Pacer(int interval_ms)
    : next_(std::chrono::steady_clock::now()), interval_(interval_ms) {}

void Pacer::tick() {
    std::this_thread::sleep_until(next_);
    next_ += interval_;
}

SendReport paced_send(UdpSocket& socket, const Endpoint& dest,
                      std::span<const rtp::RtpPacket> packets, int interval_ms) {
    SendReport report;
    if (packets.empty()) return report;

    const auto start = std::chrono::steady_clock::now();
    Pacer pacer(interval_ms);
    for (const auto& pkt : packets) {
        pacer.tick();
        try {
            const auto bytes = rtp::serialize(pkt);
            socket.send_to(dest, bytes);
            report.packets_sent++;
            report.bytes_sent += bytes.size();
        } catch (const IoError&) {
            report.send_errors++;  // keep cadence; next packet may succeed
        }
    }
    report.elapsed_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return report;
}

std::vector<JitterEvent> receive_ordered(UdpSocket& socket, JitterBuffer& jb,
                                         int idle_timeout_ms, ReceiveStats* stats) {
    std::vector<JitterEvent> events;
    while (auto dg = socket.receive(idle_timeout_ms)) {
        if (stats) stats->datagrams++;
        try {
            auto batch = jb.push(rtp::parse(dg->bytes));
            events.insert(events.end(), std::make_move_iterator(batch.begin()),
                          std::make_move_iterator(batch.end()));
        } catch (const ProtocolError&) {
            if (stats) stats->malformed++;
        }
    }
    auto rest = jb.flush();
    events.insert(events.end(), std::make_move_iterator(rest.begin()),
                  std::make_move_iterator(rest.end()));
    return events;
}

}  // namespace rtva::net
