#pragma once

#include <vector>

#include "cvcc/bytes.hpp"
#include "cvcc/group.hpp"

namespace cvcc::crypto {

// Schnorr signature in challenge/response form: 32 bytes each, 64 on the
// wire, which is what keeps the frame layout group-independent.
struct Signature {
    Scalar e;
    Scalar s;
    bool operator==(const Signature&) const = default;

    std::array<uint8_t, 64> to_bytes(const Group& g) const;
    static Signature from_bytes(const Group& g, ByteView b); // ParseError if not 64 bytes
};

// R = kG, e = H(canon("sig", R, X, msg)) mod q, s = k + e*x mod q.
// Deterministic for fixed k; callers derive k from the secret and message.
Signature schnorr_sign(const Group& g, const Scalar& x, ByteView msg, const Scalar& k);

// Recompute R' = sG - eX and accept iff the challenge hash matches.
// X must be a valid non-identity element.
bool schnorr_verify(const Group& g, const Element& pub, ByteView msg, const Signature& sig);

struct BatchItem {
    Element pub;
    Bytes msg;
    Signature sig;
};

// Small-exponent batch check over the whole list: with per-item weights w_i
// derived from the batch content (forced nonzero), accept iff
//   (sum w_i * s_i) G  ==  prod R'_i^{w_i} * prod X_i^{w_i * e'_i}
// where R'_i is recomputed as in single verification and e'_i is the
// recomputed challenge. A single bad signature always breaks the equation;
// multiple bad items cancel with probability at most 1/q per weight draw.
// Weights come from hashing the batch itself, so the verdict is a pure
// function of the input list.
bool batch_verify(const Group& g, const std::vector<BatchItem>& items);

} // namespace cvcc::crypto
