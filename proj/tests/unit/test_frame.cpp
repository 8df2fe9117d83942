#include "doctest.h"

#include <fstream>

#include "cvcc/protocol.hpp"
#include "test_util.hpp"

using namespace cvcc;
using namespace cvcc::proto;

#ifndef CVCC_GOLDEN_DIR
#define CVCC_GOLDEN_DIR "tests/golden"
#endif

namespace {

// Fixed deterministic fixture: toy group, all-zero RA seed.
struct Fixture {
    RaRegistry ra;
    LoginState car;
    RsuSecret rsu;

    Fixture() {
        Nonce32 seed{};
        ra.params = ra_init(seed, crypto::make_toy_group(), 300);
        TpdRecord tpd = register_vehicle(ra, to_bytes("car-1"), to_bytes("pw1"), 1'000'000);
        car = login(tpd, to_bytes("car-1"), to_bytes("pw1"));
        rsu = register_rsu(ra.params, to_bytes("rsu-1"));
    }
};

std::string read_golden(const std::string& name) {
    std::ifstream in(std::string(CVCC_GOLDEN_DIR) + "/" + name);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << name);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("wire layout constants") {
    Fixture f;
    Nonce32 nonce;
    nonce.fill(0x05);
    MessageFrame frame = make_request(f.car, Channel::V2R, to_bytes("hello"), 5000, nonce,
                                      f.rsu.rsu_id);
    Bytes wire = encode_frame(frame);
    CHECK(wire.size() == kFrameHeaderSize + 5 + kMacAuthSize);
    CHECK(wire[0] == 0x01);                       // version
    CHECK(wire[1] == 0x01);                       // request
    CHECK(wire[2] == 0x02);                       // V2R
    CHECK(read_be64(wire, 35) == 5000);           // timestamp
    CHECK(read_be16(wire, 75) == 5);              // payload length
    CHECK(Bytes(wire.begin() + 3, wire.begin() + 35) ==
          Bytes(frame.sender_pid.begin(), frame.sender_pid.end()));
}

// The golden hex dumps pin the bit-exact wire contract.
TEST_CASE("golden V2R frame") {
    Fixture f;
    Nonce32 nonce;
    nonce.fill(0x05);
    MessageFrame frame = make_request(f.car, Channel::V2R, to_bytes("hello"), 5000, nonce,
                                      f.rsu.rsu_id);
    CHECK(hex_encode(encode_frame(frame)) == read_golden("frame_v2r_toy.hex"));
}

TEST_CASE("golden V2V frame with certificate") {
    Fixture f;
    Nonce32 nonce;
    nonce.fill(0x07);
    MessageFrame frame = make_request(f.car, Channel::V2V, to_bytes("brake"), 6000, nonce, {});
    CHECK(hex_encode(encode_frame(frame)) == read_golden("frame_v2v_toy.hex"));
}

TEST_CASE("decode inverts encode on every channel") {
    Fixture f;
    const auto& g = *f.ra.params.pub->group;
    test::Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        Nonce32 nonce = rng.nonce();
        Bytes payload = rng.bytes(rng.below(100));
        Channel ch = static_cast<Channel>(1 + rng.below(4));
        MessageFrame frame;
        if (ch == Channel::R2VC)
            frame = make_rsu_request(f.rsu, payload, 1000 + i, nonce);
        else
            frame = make_vehicle_frame(f.car, MsgType::Request, ch, payload, 1000 + i, nonce,
                                       f.rsu.rsu_id);
        MessageFrame back = decode_frame(g, encode_frame(frame));
        CHECK(back.type == frame.type);
        CHECK(back.channel == frame.channel);
        CHECK(back.sender_pid == frame.sender_pid);
        CHECK(back.timestamp_ms == frame.timestamp_ms);
        CHECK(back.nonce == frame.nonce);
        CHECK(back.payload == frame.payload);
        CHECK(back.auth == frame.auth);
        CHECK(back.cert == frame.cert);
        CHECK(encode_frame(back) == encode_frame(frame));
    }
}

TEST_CASE("decode rejects malformed wires") {
    Fixture f;
    const auto& g = *f.ra.params.pub->group;
    Nonce32 nonce{};
    MessageFrame frame = make_request(f.car, Channel::V2R, to_bytes("xy"), 100, nonce,
                                      f.rsu.rsu_id);
    Bytes wire = encode_frame(frame);

    CHECK_ERRC(decode_frame(g, ByteView(wire.data(), 10)), Errc::ParseError);
    Bytes bad_version = wire;
    bad_version[0] = 0x02;
    CHECK_ERRC(decode_frame(g, bad_version), Errc::ParseError);
    Bytes bad_type = wire;
    bad_type[1] = 0x09;
    CHECK_ERRC(decode_frame(g, bad_type), Errc::ParseError);
    Bytes truncated = wire;
    truncated.pop_back();
    CHECK_ERRC(decode_frame(g, truncated), Errc::ParseError);
    Bytes trailing = wire;
    trailing.push_back(0x00);
    CHECK_ERRC(decode_frame(g, trailing), Errc::ParseError);
}
