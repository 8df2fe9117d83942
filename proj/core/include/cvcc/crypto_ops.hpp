#pragma once

#include "cvcc/bytes.hpp"
#include "cvcc/group.hpp"
#include "cvcc/opcount.hpp"
#include "cvcc/sha256.hpp"

namespace cvcc::crypto {

// Counting entry points. Internals call the raw primitives; the stack calls
// these, so recorded counts follow the operations the formulas name.

inline Digest hash(ByteView data) {
    metrics::note_op(metrics::OpKind::Hash);
    return sha256(data);
}

inline Bytes xor_op(ByteView a, ByteView b) {
    metrics::note_op(metrics::OpKind::Xor);
    return xor_bytes(a, b);
}

inline Digest xor_op(const Digest& a, const Digest& b) {
    metrics::note_op(metrics::OpKind::Xor);
    return xor_digest(a, b);
}

inline Element scalar_mul(const Group& g, const Element& p, const Scalar& k) {
    metrics::note_op(metrics::OpKind::ScalarMul);
    return g.scalar_mul(p, k);
}

} // namespace cvcc::crypto
