#include "doctest.h"

#include <random>

#include "rtva/errors.hpp"
#include "rtva/rtp.hpp"
#include "rtva/transport.hpp"

using namespace rtva;

namespace {

rtp::RtpPacket random_packet(std::mt19937& rng) {
    rtp::RtpPacket p;
    p.header.padding = rng() & 1;
    p.header.extension = rng() & 1;
    p.header.marker = rng() & 1;
    p.header.payload_type = (uint8_t)(rng() % 128);
    p.header.sequence_number = (uint16_t)rng();
    p.header.timestamp = rng();
    p.header.ssrc = rng();
    p.payload.resize(1 + rng() % 200);
    for (auto& b : p.payload) b = (uint8_t)rng();
    return p;
}

rtp::RtpPacket seq_packet(uint16_t seq) {
    rtp::RtpPacket p;
    p.header.sequence_number = seq;
    p.payload = {1, 2, 3};
    return p;
}

}  // namespace

TEST_CASE("golden packet bytes") {
    rtp::RtpPacket p;
    p.header.payload_type = 111;
    p.header.sequence_number = 1;
    p.header.timestamp = 320;
    p.header.ssrc = 0x12345678;
    p.payload = {0xAA};

    const auto bytes = rtp::serialize(p);
    REQUIRE(bytes.size() == 13);
    CHECK(bytes[0] == 0x80);  // V=2, P=X=CC=0
    CHECK(bytes[1] == 0x6F);  // M=0, PT=111
    CHECK(bytes[2] == 0x00);
    CHECK(bytes[3] == 0x01);
    CHECK(bytes[4] == 0x00);
    CHECK(bytes[5] == 0x00);
    CHECK(bytes[6] == 0x01);
    CHECK(bytes[7] == 0x40);  // 320
    CHECK(bytes[8] == 0x12);
    CHECK(bytes[9] == 0x34);
    CHECK(bytes[10] == 0x56);
    CHECK(bytes[11] == 0x78);
    CHECK(bytes[12] == 0xAA);

    const auto back = rtp::parse(bytes);
    CHECK(back == p);
}

TEST_CASE("parse(serialize(p)) identity on fuzzed packets") {
    std::mt19937 rng(17);
    for (int i = 0; i < 10000; ++i) {
        const auto p = random_packet(rng);
        REQUIRE(rtp::parse(rtp::serialize(p)) == p);
    }
}

TEST_CASE("parse rejects malformed inputs") {
    SUBCASE("header only, empty payload") {
        std::vector<uint8_t> bytes(12, 0);
        bytes[0] = 0x80;
        CHECK_THROWS_AS(rtp::parse(bytes), TruncationError);
    }
    SUBCASE("too short") {
        std::vector<uint8_t> bytes(5, 0);
        CHECK_THROWS_AS(rtp::parse(bytes), TruncationError);
    }
    SUBCASE("wrong version") {
        std::vector<uint8_t> bytes(13, 0);
        bytes[0] = 0x40;  // version 1
        CHECK_THROWS_AS(rtp::parse(bytes), ProtocolError);
    }
    SUBCASE("nonzero CSRC count") {
        std::vector<uint8_t> bytes(13, 0);
        bytes[0] = 0x81;
        CHECK_THROWS_AS(rtp::parse(bytes), ProtocolError);
    }
}

TEST_CASE("sequence wraparound") {
    net::Packetizer pk(rtp::kPayloadTypeOpus, 1);
    // Drive the sequence to 65535 regardless of the random start.
    while (pk.next_sequence() != 65535) (void)pk.packetize({1});
    auto last = pk.packetize({1});
    CHECK(last.header.sequence_number == 65535);
    auto wrapped = pk.packetize({1});
    CHECK(wrapped.header.sequence_number == 0);
    CHECK(rtp::seq_distance(wrapped.header.sequence_number,
                            last.header.sequence_number) == 1);
}

TEST_CASE("packetizer numbering and timestamps") {
    net::Packetizer pk(rtp::kPayloadTypePassthrough, 42);
    auto a = pk.packetize({1});
    auto b = pk.packetize({2});
    auto c = pk.packetize({3}, true);
    CHECK(rtp::seq_distance(b.header.sequence_number, a.header.sequence_number) == 1);
    CHECK(rtp::seq_distance(c.header.sequence_number, b.header.sequence_number) == 1);
    CHECK(b.header.timestamp - a.header.timestamp == rtp::kTimestampPerPacket);
    CHECK(c.header.timestamp - b.header.timestamp == rtp::kTimestampPerPacket);
    CHECK(a.header.ssrc == b.header.ssrc);
    CHECK(c.header.marker);

    // Same seed, same stream identity.
    net::Packetizer pk2(rtp::kPayloadTypePassthrough, 42);
    auto a2 = pk2.packetize({1});
    CHECK(a2.header.sequence_number == a.header.sequence_number);
    CHECK(a2.header.ssrc == a.header.ssrc);
}

TEST_CASE("jitter buffer reorders within depth") {
    net::JitterBuffer jb(3);
    std::vector<uint16_t> emitted;
    for (uint16_t seq : {1, 3, 2}) {
        for (auto& ev : jb.push(seq_packet(seq))) {
            REQUIRE(ev.kind == net::JitterEvent::Kind::packet);
            emitted.push_back(ev.packet.header.sequence_number);
        }
    }
    CHECK(emitted == std::vector<uint16_t>{1, 2, 3});
}

TEST_CASE("jitter buffer surrenders a gap older than the depth") {
    net::JitterBuffer jb(3);
    (void)jb.push(seq_packet(4));  // primes at 4, emits it

    std::vector<std::pair<bool, uint16_t>> log;  // (is_loss, seq)
    for (uint16_t seq : {6, 7, 8}) {
        for (auto& ev : jb.push(seq_packet(seq))) {
            if (ev.kind == net::JitterEvent::Kind::loss) {
                log.emplace_back(true, ev.sequence);
            } else {
                log.emplace_back(false, ev.packet.header.sequence_number);
            }
        }
    }
    REQUIRE(log.size() == 4);
    CHECK(log[0] == std::make_pair(true, (uint16_t)5));
    CHECK(log[1] == std::make_pair(false, (uint16_t)6));
    CHECK(log[2] == std::make_pair(false, (uint16_t)7));
    CHECK(log[3] == std::make_pair(false, (uint16_t)8));
}

TEST_CASE("jitter buffer drops duplicates") {
    net::JitterBuffer jb(3);
    (void)jb.push(seq_packet(1));
    (void)jb.push(seq_packet(4));   // pending
    auto evs = jb.push(seq_packet(4));  // duplicate of pending
    CHECK(evs.empty());
    CHECK(jb.duplicates_dropped() == 1);

    auto evs2 = jb.push(seq_packet(1));  // already emitted
    CHECK(evs2.empty());
    CHECK(jb.late_dropped() == 1);

    // Drain: 2,3 lost, 4 emitted; each sequence appears at most once overall.
    auto rest = jb.flush();
    REQUIRE(rest.size() == 3);
    CHECK(rest[0].kind == net::JitterEvent::Kind::loss);
    CHECK(rest[1].kind == net::JitterEvent::Kind::loss);
    CHECK(rest[2].packet.header.sequence_number == 4);
}

TEST_CASE("jitter buffer handles sequence wraparound") {
    net::JitterBuffer jb(3);
    std::vector<uint16_t> emitted;
    for (uint16_t seq : {65534, 0, 65535, 1}) {
        for (auto& ev : jb.push(seq_packet(seq))) {
            REQUIRE(ev.kind == net::JitterEvent::Kind::packet);
            emitted.push_back(ev.packet.header.sequence_number);
        }
    }
    CHECK(emitted == std::vector<uint16_t>{65534, 65535, 0, 1});
}

TEST_CASE("paced send meets the 20 ms cadence") {
    net::UdpSocket rx;
    rx.bind(0);
    net::UdpSocket tx;

    std::vector<rtp::RtpPacket> packets;
    net::Packetizer pk(rtp::kPayloadTypePassthrough, 3);
    for (int i = 0; i < 50; ++i) packets.push_back(pk.packetize({(uint8_t)i, 1}));

    const auto report =
        net::paced_send(tx, {"127.0.0.1", rx.local_port()}, packets, 20);
    CHECK(report.packets_sent == 50);
    CHECK(report.send_errors == 0);
    // 49 inter-send gaps of 20 ms, with allowance for scheduler jitter.
    CHECK(report.elapsed_ms >= 960.0);
    CHECK(report.elapsed_ms <= 1150.0);

    net::JitterBuffer jb(3);
    auto events = net::receive_ordered(rx, jb, 100);
    REQUIRE(events.size() == 50);
    uint32_t prev_ts = events[0].packet.header.timestamp;
    for (size_t i = 1; i < events.size(); ++i) {
        CHECK(events[i].packet.header.timestamp - prev_ts == 320);
        prev_ts = events[i].packet.header.timestamp;
    }
}

TEST_CASE("paced send of an empty stream is an empty report") {
    net::UdpSocket tx;
    const auto report = net::paced_send(tx, {"127.0.0.1", 9}, {}, 20);
    CHECK(report.packets_sent == 0);
    CHECK(report.elapsed_ms == 0.0);
}

TEST_CASE("receive loop skips malformed datagrams") {
    net::UdpSocket rx;
    rx.bind(0);
    net::UdpSocket tx;
    const net::Endpoint dest{"127.0.0.1", rx.local_port()};

    tx.send_to(dest, std::vector<uint8_t>{0x40, 0x00, 0x01});  // garbage
    net::Packetizer pk(rtp::kPayloadTypeOpus, 5);
    tx.send_to(dest, rtp::serialize(pk.packetize({9, 9})));

    net::JitterBuffer jb(3);
    net::ReceiveStats stats;
    auto events = net::receive_ordered(rx, jb, 100, &stats);
    CHECK(stats.datagrams == 2);
    CHECK(stats.malformed == 1);
    REQUIRE(events.size() == 1);
    CHECK(events[0].packet.payload == std::vector<uint8_t>{9, 9});
}

TEST_CASE("endpoint parsing") {
    auto ep = net::Endpoint::parse("10.0.0.1:5004");
    CHECK(ep.host == "10.0.0.1");
    CHECK(ep.port == 5004);
    CHECK(ep.to_string() == "10.0.0.1:5004");
    CHECK_THROWS_AS(net::Endpoint::parse("nope"), ParamError);
    CHECK_THROWS_AS(net::Endpoint::parse("1.2.3.4:99999"), ParamError);
}
