#include "cvcc/protocol.hpp"

namespace cvcc::proto {

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::V2V: return "v2v";
        case Channel::V2R: return "v2r";
        case Channel::R2VC: return "r2vc";
        case Channel::V2VC: return "v2vc";
    }
    return "?";
}

Bytes Certificate::signing_bytes() const {
    return canon({to_bytes("cert"), ByteView(pid), pub.enc, be64(expiry_ms)});
}

Bytes Certificate::encode() const {
    return canon({ByteView(pid), pub.enc, be64(expiry_ms),
                  to_bytes(ra_sig.e.v.to_be_bytes()), to_bytes(ra_sig.s.v.to_be_bytes())});
}

Certificate Certificate::decode(const Group& g, ByteView data) {
    std::vector<Bytes> fields = canon_decode(data);
    if (fields.size() != 5 || fields[0].size() != 32 || fields[2].size() != 8 ||
        fields[3].size() != 32 || fields[4].size() != 32)
        raise(Errc::ParseError, "malformed certificate");
    Certificate cert;
    std::copy(fields[0].begin(), fields[0].end(), cert.pid.begin());
    cert.pub = Element{fields[1]};
    cert.expiry_ms = read_be64(fields[2], 0);
    cert.ra_sig = Signature{g.scalar_from_be(fields[3]), g.scalar_from_be(fields[4])};
    return cert;
}

Bytes frame_auth_input(const MessageFrame& f) {
    uint8_t type = static_cast<uint8_t>(f.type);
    uint8_t channel = static_cast<uint8_t>(f.channel);
    return canon({ByteView(&f.version, 1), ByteView(&type, 1), ByteView(&channel, 1),
                  ByteView(f.sender_pid), be64(f.timestamp_ms), ByteView(f.nonce), f.payload});
}

static size_t auth_size(Channel c) {
    return c == Channel::V2V ? kSignatureAuthSize : kMacAuthSize;
}

Bytes encode_frame(const MessageFrame& f) {
    if (f.payload.size() >= (1u << 16)) raise(Errc::PayloadTooLong, "payload exceeds 2^16-1 bytes");
    if (f.auth.size() != auth_size(f.channel)) raise(Errc::Internal, "authenticator size mismatch");
    if ((f.channel == Channel::V2V) != f.cert.has_value())
        raise(Errc::Internal, "certificate presence must match channel");

    Bytes out;
    out.reserve(kFrameHeaderSize + f.payload.size() + f.auth.size());
    out.push_back(f.version);
    out.push_back(static_cast<uint8_t>(f.type));
    out.push_back(static_cast<uint8_t>(f.channel));
    append(out, ByteView(f.sender_pid));
    append(out, be64(f.timestamp_ms));
    append(out, ByteView(f.nonce));
    append(out, be16(static_cast<uint16_t>(f.payload.size())));
    append(out, f.payload);
    append(out, f.auth);
    if (f.cert) append(out, f.cert->encode());
    return out;
}

MessageFrame decode_frame(const Group& g, ByteView wire) {
    if (wire.size() < kFrameHeaderSize) raise(Errc::ParseError, "frame shorter than header");
    MessageFrame f;
    f.version = wire[0];
    if (f.version != 0x01) raise(Errc::ParseError, "unsupported frame version");
    uint8_t type = wire[1];
    if (type < 0x01 || type > 0x04) raise(Errc::ParseError, "unknown message type");
    f.type = static_cast<MsgType>(type);
    uint8_t channel = wire[2];
    if (channel < 0x01 || channel > 0x04) raise(Errc::ParseError, "unknown channel");
    f.channel = static_cast<Channel>(channel);
    std::copy(wire.begin() + 3, wire.begin() + 35, f.sender_pid.begin());
    f.timestamp_ms = read_be64(wire, 35);
    std::copy(wire.begin() + 43, wire.begin() + 75, f.nonce.begin());
    uint16_t payload_len = read_be16(wire, 75);

    size_t off = kFrameHeaderSize;
    if (off + payload_len > wire.size()) raise(Errc::ParseError, "payload truncated");
    f.payload.assign(wire.begin() + static_cast<ptrdiff_t>(off),
                     wire.begin() + static_cast<ptrdiff_t>(off + payload_len));
    off += payload_len;

    size_t asz = auth_size(f.channel);
    if (off + asz > wire.size()) raise(Errc::ParseError, "authenticator truncated");
    f.auth.assign(wire.begin() + static_cast<ptrdiff_t>(off),
                  wire.begin() + static_cast<ptrdiff_t>(off + asz));
    off += asz;

    if (f.channel == Channel::V2V) {
        f.cert = Certificate::decode(g, wire.subspan(off));
    } else if (off != wire.size()) {
        raise(Errc::ParseError, "trailing bytes after frame");
    }
    return f;
}

} // namespace cvcc::proto
