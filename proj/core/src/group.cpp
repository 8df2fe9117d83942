#include "cvcc/group.hpp"

namespace cvcc::crypto {

using uint128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Toy group: order-q subgroup of Z*_p, all arithmetic on uint64.
// ---------------------------------------------------------------------------

namespace {

bool is_small_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<uint128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
    uint64_t r = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

class ToyGroup final : public Group {
public:
    ToyGroup(uint64_t p, uint64_t q, uint64_t g) : p_(p), q_(q), g_(g) {
        if (!is_small_prime(p) || !is_small_prime(q) || q >= p || (p - 1) % q != 0)
            raise(Errc::InvalidGroup, "toy group needs primes q | p-1");
        if (g <= 1 || g >= p || powmod_u64(g, q, p) != 1)
            raise(Errc::InvalidGroup, "generator does not have order q");
        width_ = 1;
        for (uint64_t v = p; v > 0xff; v >>= 8) ++width_;
        order_ = U256::from_u64(q);
        generator_ = encode(g);
        identity_ = encode(1);
    }

    GroupKind kind() const override { return GroupKind::ToyModP; }
    std::string name() const override {
        return "toy-modp-" + std::to_string(p_) + "-" + std::to_string(q_);
    }
    const U256& order() const override { return order_; }
    const Element& generator() const override { return generator_; }
    const Element& identity() const override { return identity_; }

    bool is_valid(const Element& e) const override {
        uint64_t v = 0;
        return try_decode(e, v);
    }

    Element mul(const Element& a, const Element& b) const override {
        return encode(mulmod_u64(decode(a), decode(b), p_));
    }

    Element div(const Element& a, const Element& b) const override {
        uint64_t inv = powmod_u64(decode(b), p_ - 2, p_);
        return encode(mulmod_u64(decode(a), inv, p_));
    }

    Element scalar_mul(const Element& p, const Scalar& k) const override {
        return encode(powmod_u64(decode(p), k.v.to_u64(), p_));
    }

private:
    Element encode(uint64_t v) const {
        Bytes enc(width_);
        for (size_t i = 0; i < width_; ++i)
            enc[width_ - 1 - i] = static_cast<uint8_t>(v >> (8 * i));
        return Element{std::move(enc)};
    }

    bool try_decode(const Element& e, uint64_t& out) const {
        if (e.enc.size() != width_) return false;
        uint64_t v = 0;
        for (uint8_t byte : e.enc) v = (v << 8) | byte;
        if (v == 0 || v >= p_) return false;
        if (powmod_u64(v, q_, p_) != 1) return false; // outside the order-q subgroup
        out = v;
        return true;
    }

    uint64_t decode(const Element& e) const {
        uint64_t v = 0;
        if (!try_decode(e, v)) raise(Errc::InvalidElement, "not a toy group element");
        return v;
    }

    uint64_t p_, q_, g_;
    size_t width_;
    U256 order_;
    Element generator_;
    Element identity_;
};

} // namespace

// ---------------------------------------------------------------------------
// secp256k1
// ---------------------------------------------------------------------------

namespace {

const U256 kP = U256::from_hex("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");
const U256 kN = U256::from_hex("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141");
const U256 kGx = U256::from_hex("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
const U256 kGy = U256::from_hex("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8");

// p = 2^256 - kC, so hi*2^256 + lo == hi*kC + lo (mod p).
constexpr uint64_t kC = 0x1000003d1ull;

U256 fe_reduce_wide(const U512& t) {
    // First fold: acc = lo + hi*kC, at most 290 bits.
    uint64_t acc[5] = {0, 0, 0, 0, 0};
    uint64_t carry = 0;
    for (size_t i = 0; i < 4; ++i) {
        uint128 v = static_cast<uint128>(t.w[4 + i]) * kC + t.w[i] + carry;
        acc[i] = static_cast<uint64_t>(v);
        carry = static_cast<uint64_t>(v >> 64);
    }
    acc[4] = carry;

    // Second fold: bring acc[4] back in; result fits in 256 bits + 1 carry.
    U256 r{{acc[0], acc[1], acc[2], acc[3]}};
    uint64_t top = acc[4];
    while (top != 0) {
        uint128 v = static_cast<uint128>(top) * kC + r.w[0];
        r.w[0] = static_cast<uint64_t>(v);
        uint64_t c = static_cast<uint64_t>(v >> 64);
        for (size_t i = 1; i < 4 && c != 0; ++i) {
            uint128 s = static_cast<uint128>(r.w[i]) + c;
            r.w[i] = static_cast<uint64_t>(s);
            c = static_cast<uint64_t>(s >> 64);
        }
        top = c;
    }
    if (r >= kP) r = u256_sub(r, kP);
    return r;
}

U256 fe_add(const U256& a, const U256& b) {
    bool carry = false;
    U256 s = u256_add(a, b, &carry);
    if (carry || s >= kP) s = u256_sub(s, kP);
    return s;
}

U256 fe_sub(const U256& a, const U256& b) {
    if (a >= b) return u256_sub(a, b);
    return u256_add(a, u256_sub(kP, b)); // a < b < p, so the sum stays below p
}

U256 fe_mul(const U256& a, const U256& b) { return fe_reduce_wide(u256_mul_wide(a, b)); }
U256 fe_sqr(const U256& a) { return fe_mul(a, a); }

U256 fe_pow(const U256& base, const U256& exp) {
    U256 result = U256::from_u64(1);
    U256 acc = base;
    size_t bits = exp.bit_length();
    for (size_t i = 0; i < bits; ++i) {
        if (exp.bit(i)) result = fe_mul(result, acc);
        acc = fe_sqr(acc);
    }
    return result;
}

U256 fe_inv(const U256& a) { return fe_pow(a, u256_sub(kP, U256::from_u64(2))); }

// p == 3 (mod 4): sqrt by exponentiation with (p+1)/4 when a root exists.
U256 fe_sqrt_candidate(const U256& a) {
    U256 e = u256_add(kP, U256::from_u64(1)); // p + 1 < 2^256, no carry
    U256 quarter{};
    uint64_t spill = 0;
    for (int i = 3; i >= 0; --i) {
        size_t k = static_cast<size_t>(i);
        uint64_t v = e.w[k];
        quarter.w[k] = (v >> 2) | (spill << 62);
        spill = v & 3;
    }
    return fe_pow(a, quarter);
}

struct Jacobian {
    U256 x, y, z; // z == 0 encodes infinity

    bool is_infinity() const { return z.is_zero(); }
    static Jacobian infinity() { return Jacobian{U256::from_u64(1), U256::from_u64(1), U256{}}; }
};

struct Affine {
    U256 x, y;
    bool infinity = false;
};

Jacobian jac_from_affine(const Affine& a) {
    if (a.infinity) return Jacobian::infinity();
    return Jacobian{a.x, a.y, U256::from_u64(1)};
}

Jacobian jac_double(const Jacobian& p) {
    if (p.is_infinity() || p.y.is_zero()) return Jacobian::infinity();
    U256 a = fe_sqr(p.x);
    U256 b = fe_sqr(p.y);
    U256 c = fe_sqr(b);
    U256 t = fe_sqr(fe_add(p.x, b));
    U256 d = fe_sub(fe_sub(t, a), c);
    d = fe_add(d, d);
    U256 e = fe_add(fe_add(a, a), a);
    U256 f = fe_sqr(e);
    U256 x3 = fe_sub(f, fe_add(d, d));
    U256 c8 = fe_add(c, c);
    c8 = fe_add(c8, c8);
    c8 = fe_add(c8, c8);
    U256 y3 = fe_sub(fe_mul(e, fe_sub(d, x3)), c8);
    U256 z3 = fe_mul(p.y, p.z);
    z3 = fe_add(z3, z3);
    return Jacobian{x3, y3, z3};
}

Jacobian jac_add(const Jacobian& p, const Jacobian& q) {
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;
    U256 z1z1 = fe_sqr(p.z);
    U256 z2z2 = fe_sqr(q.z);
    U256 u1 = fe_mul(p.x, z2z2);
    U256 u2 = fe_mul(q.x, z1z1);
    U256 s1 = fe_mul(p.y, fe_mul(q.z, z2z2));
    U256 s2 = fe_mul(q.y, fe_mul(p.z, z1z1));
    if (u1 == u2) {
        if (s1 == s2) return jac_double(p);
        return Jacobian::infinity();
    }
    U256 h = fe_sub(u2, u1);
    U256 i = fe_sqr(fe_add(h, h));
    U256 j = fe_mul(h, i);
    U256 r = fe_sub(s2, s1);
    r = fe_add(r, r);
    U256 v = fe_mul(u1, i);
    U256 x3 = fe_sub(fe_sub(fe_sqr(r), j), fe_add(v, v));
    U256 s1j = fe_mul(s1, j);
    U256 y3 = fe_sub(fe_mul(r, fe_sub(v, x3)), fe_add(s1j, s1j));
    U256 z3 = fe_mul(fe_mul(p.z, q.z), h);
    z3 = fe_add(z3, z3);
    return Jacobian{x3, y3, z3};
}

Affine jac_to_affine(const Jacobian& p) {
    if (p.is_infinity()) return Affine{U256{}, U256{}, true};
    U256 zi = fe_inv(p.z);
    U256 zi2 = fe_sqr(zi);
    return Affine{fe_mul(p.x, zi2), fe_mul(p.y, fe_mul(zi, zi2)), false};
}

Jacobian jac_scalar_mul(const Jacobian& p, const U256& k) {
    Jacobian r = Jacobian::infinity();
    size_t bits = k.bit_length();
    for (size_t i = bits; i-- > 0;) {
        r = jac_double(r);
        if (k.bit(i)) r = jac_add(r, p);
    }
    return r;
}

class Secp256k1 final : public Group {
public:
    Secp256k1() {
        generator_ = encode(Affine{kGx, kGy, false});
        identity_ = Element{Bytes{0x00}};
    }

    GroupKind kind() const override { return GroupKind::StandardCurve; }
    std::string name() const override { return "secp256k1"; }
    const U256& order() const override { return kN; }
    const Element& generator() const override { return generator_; }
    const Element& identity() const override { return identity_; }

    bool is_valid(const Element& e) const override {
        Affine a;
        return try_decode(e, a);
    }

    Element mul(const Element& a, const Element& b) const override {
        return encode(jac_to_affine(jac_add(jac_from_affine(decode(a)), jac_from_affine(decode(b)))));
    }

    Element div(const Element& a, const Element& b) const override {
        Affine nb = decode(b);
        if (!nb.infinity && !nb.y.is_zero()) nb.y = u256_sub(kP, nb.y);
        return encode(jac_to_affine(jac_add(jac_from_affine(decode(a)), jac_from_affine(nb))));
    }

    Element scalar_mul(const Element& p, const Scalar& k) const override {
        return encode(jac_to_affine(jac_scalar_mul(jac_from_affine(decode(p)), k.v)));
    }

private:
    Element encode(const Affine& a) const {
        if (a.infinity) return Element{Bytes{0x00}};
        Bytes enc(33);
        enc[0] = a.y.bit(0) ? 0x03 : 0x02;
        auto xb = a.x.to_be_bytes();
        std::copy(xb.begin(), xb.end(), enc.begin() + 1);
        return Element{std::move(enc)};
    }

    bool try_decode(const Element& e, Affine& out) const {
        if (e.enc.size() == 1 && e.enc[0] == 0x00) {
            out = Affine{U256{}, U256{}, true};
            return true;
        }
        if (e.enc.size() != 33 || (e.enc[0] != 0x02 && e.enc[0] != 0x03)) return false;
        U256 x = U256::from_be_bytes(ByteView(e.enc.data() + 1, 32));
        if (x >= kP) return false;
        U256 rhs = fe_add(fe_mul(fe_sqr(x), x), U256::from_u64(7));
        U256 y = fe_sqrt_candidate(rhs);
        if (fe_sqr(y) != rhs) return false; // x not on the curve
        if (y.bit(0) != (e.enc[0] == 0x03)) y = fe_sub(kP, y);
        out = Affine{x, y, false};
        return true;
    }

    Affine decode(const Element& e) const {
        Affine a;
        if (!try_decode(e, a)) raise(Errc::InvalidElement, "not a curve point encoding");
        return a;
    }

    Element generator_;
    Element identity_;
};

} // namespace

GroupPtr make_toy_group(uint64_t p, uint64_t q, uint64_t g) {
    return std::make_shared<ToyGroup>(p, q, g);
}

GroupPtr make_secp256k1() { return std::make_shared<Secp256k1>(); }

GroupPtr make_group(GroupKind kind) {
    return kind == GroupKind::ToyModP ? make_toy_group() : make_secp256k1();
}

} // namespace cvcc::crypto
