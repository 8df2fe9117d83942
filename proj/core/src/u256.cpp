#include "cvcc/u256.hpp"

namespace cvcc {

using uint128 = unsigned __int128;

U256 U256::from_be_bytes(ByteView b) {
    if (b.size() > 32) raise(Errc::ParseError, "integer wider than 256 bits");
    U256 r;
    size_t bit = 0;
    for (size_t i = 0; i < b.size(); ++i) {
        uint8_t byte = b[b.size() - 1 - i];
        r.w[bit / 64] |= static_cast<uint64_t>(byte) << (bit % 64);
        bit += 8;
    }
    return r;
}

U256 U256::from_hex(std::string_view hex) { return from_be_bytes(hex_decode(hex)); }

std::array<uint8_t, 32> U256::to_be_bytes() const {
    std::array<uint8_t, 32> out{};
    for (size_t i = 0; i < 32; ++i) out[31 - i] = static_cast<uint8_t>(w[i / 8] >> (8 * (i % 8)));
    return out;
}

size_t U256::bit_length() const {
    for (int limb = 3; limb >= 0; --limb) {
        uint64_t v = w[static_cast<size_t>(limb)];
        if (v != 0) {
            size_t top = 63;
            while (!(v >> top)) --top;
            return static_cast<size_t>(limb) * 64 + top + 1;
        }
    }
    return 0;
}

U256 u256_add(const U256& a, const U256& b, bool* carry) {
    U256 r;
    uint128 c = 0;
    for (size_t i = 0; i < 4; ++i) {
        uint128 t = static_cast<uint128>(a.w[i]) + b.w[i] + c;
        r.w[i] = static_cast<uint64_t>(t);
        c = t >> 64;
    }
    if (carry != nullptr) *carry = c != 0;
    return r;
}

U256 u256_sub(const U256& a, const U256& b, bool* borrow) {
    U256 r;
    uint64_t bw = 0;
    for (size_t i = 0; i < 4; ++i) {
        uint64_t d = a.w[i] - b.w[i];
        uint64_t bw2 = (a.w[i] < b.w[i]) || (d < bw);
        r.w[i] = d - bw;
        bw = bw2;
    }
    if (borrow != nullptr) *borrow = bw != 0;
    return r;
}

U512 u256_mul_wide(const U256& a, const U256& b) {
    U512 r;
    for (size_t i = 0; i < 4; ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < 4; ++j) {
            uint128 t = static_cast<uint128>(a.w[i]) * b.w[j] + r.w[i + j] + carry;
            r.w[i + j] = static_cast<uint64_t>(t);
            carry = static_cast<uint64_t>(t >> 64);
        }
        r.w[i + 4] = carry;
    }
    return r;
}

namespace {

// 320-bit working register for the shift-subtract reduction.
struct U320 {
    std::array<uint64_t, 5> w{0, 0, 0, 0, 0};

    void shl1_or(bool low_bit) {
        for (int i = 4; i > 0; --i)
            w[static_cast<size_t>(i)] = (w[static_cast<size_t>(i)] << 1) |
                                        (w[static_cast<size_t>(i) - 1] >> 63);
        w[0] = (w[0] << 1) | (low_bit ? 1u : 0u);
    }

    bool ge(const U256& n) const {
        if (w[4] != 0) return true;
        for (int i = 3; i >= 0; --i) {
            size_t k = static_cast<size_t>(i);
            if (w[k] != n.w[k]) return w[k] > n.w[k];
        }
        return true;
    }

    void sub(const U256& n) {
        uint64_t borrow = 0;
        for (size_t i = 0; i < 4; ++i) {
            uint64_t d = w[i] - n.w[i];
            uint64_t b2 = (w[i] < n.w[i]) || (d < borrow);
            w[i] = d - borrow;
            borrow = b2;
        }
        w[4] -= borrow;
    }
};

} // namespace

U256 u512_mod(const U512& a, const U256& n) {
    if (n.is_zero()) raise(Errc::Internal, "modulus is zero");
    U320 r;
    for (int i = 511; i >= 0; --i) {
        r.shl1_or(a.bit(static_cast<size_t>(i)));
        if (r.ge(n)) r.sub(n);
    }
    U256 out;
    for (size_t i = 0; i < 4; ++i) out.w[i] = r.w[i];
    return out;
}

U256 u256_mod(const U256& a, const U256& n) {
    U512 wide;
    for (size_t i = 0; i < 4; ++i) wide.w[i] = a.w[i];
    return u512_mod(wide, n);
}

U256 addmod(const U256& a, const U256& b, const U256& n) {
    bool carry = false;
    U256 s = u256_add(a, b, &carry);
    if (carry || s >= n) {
        bool borrow = false;
        U256 r = u256_sub(s, n, &borrow);
        return r;
    }
    return s;
}

U256 submod(const U256& a, const U256& b, const U256& n) {
    if (a >= b) return u256_sub(a, b);
    U256 diff = u256_sub(b, a);
    return u256_sub(n, diff);
}

U256 mulmod(const U256& a, const U256& b, const U256& n) {
    return u512_mod(u256_mul_wide(a, b), n);
}

U256 powmod(const U256& base, const U256& exp, const U256& n) {
    U256 result = u256_mod(U256::from_u64(1), n);
    U256 acc = u256_mod(base, n);
    size_t bits = exp.bit_length();
    for (size_t i = 0; i < bits; ++i) {
        if (exp.bit(i)) result = mulmod(result, acc, n);
        acc = mulmod(acc, acc, n);
    }
    return result;
}

} // namespace cvcc
