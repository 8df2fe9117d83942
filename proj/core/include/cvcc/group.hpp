#pragma once

#include <memory>
#include <string>

#include "cvcc/bytes.hpp"
#include "cvcc/u256.hpp"

namespace cvcc::crypto {

enum class GroupKind { ToyModP, StandardCurve };

// Scalar in [0, q). Always kept reduced by the owning group's helpers.
struct Scalar {
    U256 v;
    bool operator==(const Scalar&) const = default;
};

// Group element carried as its canonical encoding: decode(encode(e)) == e
// and every element has exactly one encoding, so byte equality is element
// equality. Toy group: fixed-width big-endian residue. Curve: 33-byte
// compressed point, with a single 0x00 byte for the identity.
struct Element {
    Bytes enc;
    bool operator==(const Element&) const = default;
    bool operator<(const Element& o) const { return enc < o.enc; }
};

// Prime-order group interface shared by the toy instantiation (used by the
// brute-force oracles) and the standard curve (realistic sizing).
class Group {
public:
    virtual ~Group() = default;

    virtual GroupKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual const U256& order() const = 0; // q, prime
    virtual const Element& generator() const = 0;
    virtual const Element& identity() const = 0;

    virtual bool is_valid(const Element& e) const = 0; // member of the order-q subgroup
    virtual Element mul(const Element& a, const Element& b) const = 0;
    virtual Element div(const Element& a, const Element& b) const = 0; // a * b^-1
    virtual Element scalar_mul(const Element& p, const Scalar& k) const = 0;

    // Scalar arithmetic mod q.
    Scalar scalar_zero() const { return Scalar{U256{}}; }
    Scalar scalar_one() const { return Scalar{U256::from_u64(1)}; }
    Scalar scalar_from_u64(uint64_t v) const { return Scalar{u256_mod(U256::from_u64(v), order())}; }
    Scalar scalar_from_be(ByteView b) const { return Scalar{u256_mod(U256::from_be_bytes(b), order())}; }
    Scalar scalar_from_digest(const Digest& d) const { return scalar_from_be(ByteView(d.data(), d.size())); }
    Scalar scalar_add(const Scalar& a, const Scalar& b) const { return Scalar{addmod(a.v, b.v, order())}; }
    Scalar scalar_sub(const Scalar& a, const Scalar& b) const { return Scalar{submod(a.v, b.v, order())}; }
    Scalar scalar_mul_mod(const Scalar& a, const Scalar& b) const { return Scalar{mulmod(a.v, b.v, order())}; }
    bool scalar_is_zero(const Scalar& a) const { return a.v.is_zero(); }
    std::array<uint8_t, 32> scalar_bytes(const Scalar& a) const { return a.v.to_be_bytes(); }
};

using GroupPtr = std::shared_ptr<const Group>;

// Subgroup of order q in Z*_p, generated by g. Defaults: p=23, q=11, g=2.
// InvalidGroup if the parameters do not describe a prime-order subgroup.
GroupPtr make_toy_group(uint64_t p = 23, uint64_t q = 11, uint64_t g = 2);

// secp256k1, 256-bit prime-order curve.
GroupPtr make_secp256k1();

GroupPtr make_group(GroupKind kind);

} // namespace cvcc::crypto
