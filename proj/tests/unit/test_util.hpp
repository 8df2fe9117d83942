#pragma once

#include <cstdint>

#include "cvcc/bytes.hpp"

namespace cvcc::test {

// Deterministic generator for property-style tests (splitmix64).
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t below(uint64_t n) { return next() % n; }

    Bytes bytes(size_t len) {
        Bytes out(len);
        for (size_t i = 0; i < len; ++i) out[i] = static_cast<uint8_t>(next());
        return out;
    }

    Nonce32 nonce() {
        Nonce32 n{};
        for (auto& b : n) b = static_cast<uint8_t>(next());
        return n;
    }

    Digest digest() {
        Digest d{};
        for (auto& b : d) b = static_cast<uint8_t>(next());
        return d;
    }
};

// Expect `expr` to throw a cvcc::Error with the given code.
#define CHECK_ERRC(expr, errc)                                    \
    do {                                                          \
        bool thrown_ = false;                                     \
        try {                                                     \
            (void)(expr);                                         \
        } catch (const cvcc::Error& e_) {                         \
            thrown_ = true;                                       \
            CHECK(e_.code() == (errc));                           \
        }                                                         \
        CHECK_MESSAGE(thrown_, #expr " did not throw " #errc);    \
    } while (0)

} // namespace cvcc::test
