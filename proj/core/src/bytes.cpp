#include "cvcc/bytes.hpp"

namespace cvcc {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::FieldTooLong: return "FieldTooLong";
        case Errc::InvalidElement: return "InvalidElement";
        case Errc::ZeroScalar: return "ZeroScalar";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::TagMismatch: return "TagMismatch";
        case Errc::InvalidGroup: return "InvalidGroup";
        case Errc::EmptyCredential: return "EmptyCredential";
        case Errc::BadCredentials: return "BadCredentials";
        case Errc::PayloadTooLong: return "PayloadTooLong";
        case Errc::NotLoggedIn: return "NotLoggedIn";
        case Errc::StaleTimestamp: return "StaleTimestamp";
        case Errc::ReplayDetected: return "ReplayDetected";
        case Errc::BadAuthenticator: return "BadAuthenticator";
        case Errc::BadCertificate: return "BadCertificate";
        case Errc::ExpiredCertificate: return "ExpiredCertificate";
        case Errc::ConfirmMismatch: return "ConfirmMismatch";
        case Errc::EmptyKeywords: return "EmptyKeywords";
        case Errc::EmptyKeyword: return "EmptyKeyword";
        case Errc::MalformedUpload: return "MalformedUpload";
        case Errc::DuplicateRecordId: return "DuplicateRecordId";
        case Errc::NotFound: return "NotFound";
        case Errc::UnknownOpKind: return "UnknownOpKind";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::Internal: return "Internal";
    }
    return "UnknownError";
}

Bytes be16(uint16_t v) {
    return {static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v & 0xff)};
}

Bytes be64(uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<size_t>(i)] = static_cast<uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

uint16_t read_be16(ByteView v, size_t off) {
    if (off + 2 > v.size()) raise(Errc::ParseError, "be16 out of bounds");
    return static_cast<uint16_t>((static_cast<uint16_t>(v[off]) << 8) | v[off + 1]);
}

uint64_t read_be64(ByteView v, size_t off) {
    if (off + 8 > v.size()) raise(Errc::ParseError, "be64 out of bounds");
    uint64_t r = 0;
    for (size_t i = 0; i < 8; ++i) r = (r << 8) | v[off + i];
    return r;
}

static const char* kHexDigits = "0123456789abcdef";

std::string hex_encode(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) raise(Errc::ParseError, "hex string has odd length");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) raise(Errc::ParseError, "non-hex character");
        out[i] = static_cast<uint8_t>((hi << 4) | lo);
    }
    return out;
}

Bytes xor_bytes(ByteView a, ByteView b) {
    if (a.size() != b.size()) raise(Errc::LengthMismatch, "xor operands differ in length");
    Bytes out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

Digest xor_digest(const Digest& a, const Digest& b) {
    Digest out;
    for (size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

static void canon_append(Bytes& out, ByteView f) {
    if (f.size() >= (1u << 16)) raise(Errc::FieldTooLong, "canon field >= 2^16 bytes");
    out.push_back(static_cast<uint8_t>(f.size() >> 8));
    out.push_back(static_cast<uint8_t>(f.size() & 0xff));
    append(out, f);
}

Bytes canon(std::initializer_list<ByteView> fields) {
    Bytes out;
    for (ByteView f : fields) canon_append(out, f);
    return out;
}

Bytes canon(const std::vector<Bytes>& fields) {
    Bytes out;
    for (const Bytes& f : fields) canon_append(out, f);
    return out;
}

std::vector<Bytes> canon_decode(ByteView data) {
    std::vector<Bytes> fields;
    size_t off = 0;
    while (off < data.size()) {
        uint16_t len = read_be16(data, off);
        off += 2;
        if (off + len > data.size()) raise(Errc::ParseError, "canon field truncated");
        fields.emplace_back(data.begin() + static_cast<ptrdiff_t>(off),
                            data.begin() + static_cast<ptrdiff_t>(off + len));
        off += len;
    }
    return fields;
}

} // namespace cvcc
