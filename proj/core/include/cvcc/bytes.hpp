#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvcc/errors.hpp"

namespace cvcc {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;
using Nonce32 = std::array<uint8_t, 32>;
using ByteView = std::span<const uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline Bytes to_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }
inline Bytes to_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }

inline void append(Bytes& out, ByteView v) { out.insert(out.end(), v.begin(), v.end()); }

Bytes be16(uint16_t v);
Bytes be64(uint64_t v);
uint16_t read_be16(ByteView v, size_t off);
uint64_t read_be64(ByteView v, size_t off);

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view hex); // throws ParseError on odd length / non-hex chars

// Bit-wise XOR of two equal-length strings. LengthMismatch otherwise.
Bytes xor_bytes(ByteView a, ByteView b);
Digest xor_digest(const Digest& a, const Digest& b);

// Canonical injective encoding of an ordered field list: for each field a
// big-endian 2-byte length followed by the field bytes. Unlike plain
// concatenation, distinct field lists never collide, which is what the
// authenticators in this stack rely on. FieldTooLong for fields >= 2^16.
Bytes canon(std::initializer_list<ByteView> fields);
Bytes canon(const std::vector<Bytes>& fields);

// Inverse of canon. ParseError if the buffer is not an exact field list.
std::vector<Bytes> canon_decode(ByteView data);

} // namespace cvcc
