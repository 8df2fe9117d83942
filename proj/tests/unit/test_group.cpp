#include "doctest.h"

#include "cvcc/group.hpp"
#include "test_util.hpp"

using namespace cvcc;
using namespace cvcc::crypto;

namespace {

// Brute-force oracle: repeated modular multiplication.
uint64_t slow_pow(uint64_t base, uint64_t exp, uint64_t p) {
    uint64_t r = 1;
    for (uint64_t i = 0; i < exp; ++i) r = (r * base) % p;
    return r;
}

Element toy_elem(const Group& g, uint64_t v) {
    Element e{Bytes{static_cast<uint8_t>(v)}};
    REQUIRE(g.is_valid(e));
    return e;
}

} // namespace

TEST_CASE("toy group matches brute-force exponentiation over the whole subgroup") {
    auto g = make_toy_group();
    // subgroup of order 11 in Z*_23
    for (uint64_t base = 1; base < 23; ++base) {
        if (slow_pow(base, 11, 23) != 1) continue;
        Element b = toy_elem(*g, base);
        for (uint64_t k = 0; k <= 10; ++k) {
            Element got = g->scalar_mul(b, g->scalar_from_u64(k));
            CHECK(got.enc == Bytes{static_cast<uint8_t>(slow_pow(base, k, 23))});
        }
    }
}

TEST_CASE("toy group fixed examples") {
    auto g = make_toy_group();
    CHECK(g->scalar_mul(g->generator(), g->scalar_from_u64(5)).enc == Bytes{9});
    CHECK(g->scalar_mul(g->generator(), g->scalar_from_u64(0)) == g->identity());
    CHECK(g->scalar_mul(g->generator(), g->scalar_from_u64(11)) == g->identity());
}

TEST_CASE("toy group validity") {
    auto g = make_toy_group();
    CHECK(g->is_valid(g->generator()));
    CHECK(g->is_valid(g->identity()));
    CHECK_FALSE(g->is_valid(Element{Bytes{0}}));     // zero residue
    CHECK_FALSE(g->is_valid(Element{Bytes{23}}));    // >= p
    CHECK_FALSE(g->is_valid(Element{Bytes{5}}));     // outside the order-11 subgroup
    CHECK_FALSE(g->is_valid(Element{Bytes{1, 2}}));  // wrong width
    CHECK_ERRC(g->scalar_mul(Element{Bytes{5}}, g->scalar_from_u64(2)), Errc::InvalidElement);
}

TEST_CASE("toy group rejects bad parameters") {
    CHECK_ERRC(make_toy_group(24, 11, 2), Errc::InvalidGroup); // p not prime
    CHECK_ERRC(make_toy_group(23, 7, 2), Errc::InvalidGroup);  // q does not divide p-1
    CHECK_ERRC(make_toy_group(23, 11, 5), Errc::InvalidGroup); // 5 has order 22
}

// Reference points recomputed with an independent big-integer implementation.
TEST_CASE("secp256k1 known multiples of G") {
    auto g = make_secp256k1();
    auto mul_g = [&](uint64_t k) {
        return hex_encode(g->scalar_mul(g->generator(), g->scalar_from_u64(k)).enc);
    };
    CHECK(hex_encode(g->generator().enc) ==
          "0279be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
    CHECK(mul_g(2) == "02c6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5");
    CHECK(mul_g(3) == "02f9308a019258c31049344f85f89d5229b531c845836f99b08601f113bce036f9");
    CHECK(mul_g(7) == "025cbdf0646e5db4eaa398f365f2ea7a0e3d419b7e0330e39ce92bddedcac4f9bc");
    CHECK(mul_g(0xDEADBEEF) ==
          "0276d2fdf1302d1fa9556f4df94ec84cefba6d482e54f47c6c2a238c1baa560f0e");
}

TEST_CASE("secp256k1 group laws") {
    auto g = make_secp256k1();
    Element two = g->scalar_mul(g->generator(), g->scalar_from_u64(2));
    Element three = g->scalar_mul(g->generator(), g->scalar_from_u64(3));
    CHECK(g->mul(g->generator(), two) == three);
    CHECK(g->div(three, two) == g->generator());
    CHECK(g->mul(three, g->identity()) == three);
    CHECK(g->div(two, two) == g->identity());
    // order * G = identity
    Scalar n_minus_1{u256_sub(g->order(), U256::from_u64(1))};
    Element last = g->scalar_mul(g->generator(), n_minus_1);
    CHECK(g->mul(last, g->generator()) == g->identity());
}

TEST_CASE("secp256k1 encodings are canonical") {
    auto g = make_secp256k1();
    test::Rng rng(9);
    for (int i = 0; i < 32; ++i) {
        Scalar k = g->scalar_from_be(rng.bytes(32));
        Element e = g->scalar_mul(g->generator(), k);
        CHECK(e.enc.size() == 33);
        CHECK(g->is_valid(e));
        // decode(encode(e)) == e holds by re-deriving through a group op
        CHECK(g->mul(e, g->identity()) == e);
    }
    Bytes over_p(33, 0xff);
    over_p[0] = 0x02; // x >= field prime
    CHECK_FALSE(g->is_valid(Element{over_p}));
    CHECK_FALSE(g->is_valid(Element{Bytes{0x04}}));
    Bytes bad_prefix(33, 0x00);
    bad_prefix[0] = 0x05;
    CHECK_FALSE(g->is_valid(Element{bad_prefix}));
}

TEST_CASE("diffie-hellman symmetry on both groups") {
    test::Rng rng(21);
    for (auto g : {make_toy_group(), make_secp256k1()}) {
        for (int i = 0; i < 10; ++i) {
            Scalar a = g->scalar_from_be(rng.bytes(32));
            Scalar b = g->scalar_from_be(rng.bytes(32));
            Element ga = g->scalar_mul(g->generator(), a);
            Element gb = g->scalar_mul(g->generator(), b);
            CHECK(g->scalar_mul(gb, a) == g->scalar_mul(ga, b));
        }
    }
}

TEST_CASE("scalar arithmetic stays reduced") {
    auto g = make_toy_group();
    Scalar a = g->scalar_from_u64(9);
    Scalar b = g->scalar_from_u64(7);
    CHECK(g->scalar_add(a, b).v == U256::from_u64(5));     // 16 mod 11
    CHECK(g->scalar_mul_mod(a, b).v == U256::from_u64(8)); // 63 mod 11
    CHECK(g->scalar_from_u64(22).v.is_zero());
    CHECK(g->scalar_sub(b, a).v == U256::from_u64(9)); // -2 mod 11
}
