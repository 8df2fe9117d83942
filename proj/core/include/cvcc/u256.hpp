#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "cvcc/bytes.hpp"

namespace cvcc {

// Fixed-width 256-bit unsigned integer, little-endian 64-bit limbs.
// Backs scalar arithmetic for both group instantiations and the secp256k1
// field. Not constant-time (out of scope for this artifact).
struct U256 {
    std::array<uint64_t, 4> w{0, 0, 0, 0};

    static U256 from_u64(uint64_t v) {
        U256 r;
        r.w[0] = v;
        return r;
    }

    static U256 from_be_bytes(ByteView b); // up to 32 bytes, big-endian
    static U256 from_hex(std::string_view hex);

    std::array<uint8_t, 32> to_be_bytes() const;
    uint64_t to_u64() const { return w[0]; } // callers ensure the value fits

    bool is_zero() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }
    bool bit(size_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
    size_t bit_length() const;

    friend bool operator==(const U256& a, const U256& b) { return a.w == b.w; }
    friend auto operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i)
            if (a.w[static_cast<size_t>(i)] != b.w[static_cast<size_t>(i)])
                return a.w[static_cast<size_t>(i)] <=> b.w[static_cast<size_t>(i)];
        return std::strong_ordering::equal;
    }
};

struct U512 {
    std::array<uint64_t, 8> w{0, 0, 0, 0, 0, 0, 0, 0};
    bool bit(size_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
};

// a + b, carry out discarded by callers that know it cannot occur.
U256 u256_add(const U256& a, const U256& b, bool* carry = nullptr);
U256 u256_sub(const U256& a, const U256& b, bool* borrow = nullptr);
U512 u256_mul_wide(const U256& a, const U256& b);

// Generic reductions (shift-subtract). Fine for scalar work; the secp256k1
// field path below is the hot one.
U256 u512_mod(const U512& a, const U256& n);
U256 u256_mod(const U256& a, const U256& n);
U256 addmod(const U256& a, const U256& b, const U256& n); // inputs already < n
U256 submod(const U256& a, const U256& b, const U256& n);
U256 mulmod(const U256& a, const U256& b, const U256& n);
U256 powmod(const U256& base, const U256& exp, const U256& n);

} // namespace cvcc
