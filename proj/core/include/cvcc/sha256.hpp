#pragma once

#include "cvcc/bytes.hpp"

namespace cvcc {

// SHA-256 (FIPS 180-4). Self-contained so the wire formats and test vectors
// do not depend on a system crypto library.
class Sha256 {
public:
    Sha256();
    void update(ByteView data);
    Digest finish();

    static Digest digest(ByteView data);

private:
    void compress(const uint8_t* block);

    uint32_t state_[8];
    uint64_t total_len_;
    uint8_t buf_[64];
    size_t buf_len_;
};

// Raw digest, no instrumentation. The counting entry point is crypto::hash().
Digest sha256(ByteView data);

} // namespace cvcc
