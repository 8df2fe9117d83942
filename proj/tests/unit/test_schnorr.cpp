#include "doctest.h"

#include "cvcc/opcount.hpp"
#include "cvcc/schnorr.hpp"
#include "test_util.hpp"

using namespace cvcc;
using namespace cvcc::crypto;

namespace {

// Draw a nonzero scalar for the given group.
Scalar nonzero(const Group& g, test::Rng& rng) {
    while (true) {
        Scalar s = g.scalar_from_be(rng.bytes(32));
        if (!g.scalar_is_zero(s)) return s;
    }
}

BatchItem signed_item(const Group& g, test::Rng& rng, size_t msg_len = 16) {
    Scalar x = nonzero(g, rng);
    Scalar k = nonzero(g, rng);
    Bytes msg = rng.bytes(msg_len);
    Element pub = g.scalar_mul(g.generator(), x);
    return BatchItem{pub, msg, schnorr_sign(g, x, msg, k)};
}

// Corrupt until the single-verify oracle rejects (on the toy group an
// arbitrary corruption can still verify with probability ~1/q).
void forge(const Group& g, BatchItem& item) {
    do {
        item.sig.s = g.scalar_add(item.sig.s, g.scalar_one());
    } while (schnorr_verify(g, item.pub, item.msg, item.sig));
}

} // namespace

// Hand-evaluated on the toy group with an independent SHA-256 tool:
// x=3 (X=8), k=5 (R=9), msg="msg":
//   e = H(canon("sig", 09, 08, "msg")) mod 11 = 5,  s = (5 + 5*3) mod 11 = 9.
TEST_CASE("toy schnorr fixed vector") {
    auto g = make_toy_group();
    Signature sig = schnorr_sign(*g, g->scalar_from_u64(3), to_bytes("msg"), g->scalar_from_u64(5));
    CHECK(sig.e.v.to_u64() == 5);
    CHECK(sig.s.v.to_u64() == 9);
    Element pub = g->scalar_mul(g->generator(), g->scalar_from_u64(3));
    CHECK(schnorr_verify(*g, pub, to_bytes("msg"), sig));

    Signature again =
        schnorr_sign(*g, g->scalar_from_u64(3), to_bytes("msg"), g->scalar_from_u64(5));
    CHECK(again == sig);
}

TEST_CASE("sign rejects zero scalars, verify rejects bad keys") {
    auto g = make_toy_group();
    CHECK_ERRC(schnorr_sign(*g, g->scalar_zero(), to_bytes("m"), g->scalar_from_u64(5)),
               Errc::ZeroScalar);
    CHECK_ERRC(schnorr_sign(*g, g->scalar_from_u64(3), to_bytes("m"), g->scalar_zero()),
               Errc::ZeroScalar);
    Signature sig =
        schnorr_sign(*g, g->scalar_from_u64(3), to_bytes("m"), g->scalar_from_u64(5));
    CHECK_ERRC(schnorr_verify(*g, g->identity(), to_bytes("m"), sig), Errc::InvalidElement);
    CHECK_ERRC(schnorr_verify(*g, Element{Bytes{5}}, to_bytes("m"), sig), Errc::InvalidElement);
}

TEST_CASE("round trip property, toy group") {
    auto g = make_toy_group();
    test::Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        Scalar x = nonzero(*g, rng);
        Scalar k = nonzero(*g, rng);
        Bytes msg = rng.bytes(1 + rng.below(32));
        Element pub = g->scalar_mul(g->generator(), x);
        CHECK(schnorr_verify(*g, pub, msg, schnorr_sign(*g, x, msg, k)));
    }
}

TEST_CASE("round trip property, standard curve") {
    auto g = make_secp256k1();
    test::Rng rng(202);
    for (int i = 0; i < 100; ++i) {
        Scalar x = nonzero(*g, rng);
        Scalar k = nonzero(*g, rng);
        Bytes msg = rng.bytes(1 + rng.below(32));
        Element pub = g->scalar_mul(g->generator(), x);
        CHECK(schnorr_verify(*g, pub, msg, schnorr_sign(*g, x, msg, k)));
    }
}

// On the curve the challenge hash makes any tampering detectable; bit flips
// in the message never verify.
TEST_CASE("standard curve rejects every flipped message bit") {
    auto g = make_secp256k1();
    test::Rng rng(303);
    Scalar x = nonzero(*g, rng);
    Element pub = g->scalar_mul(g->generator(), x);
    Bytes msg = rng.bytes(8);
    Signature sig = schnorr_sign(*g, x, msg, nonzero(*g, rng));
    for (size_t bit = 0; bit < msg.size() * 8; ++bit) {
        Bytes flipped = msg;
        flipped[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        CHECK_FALSE(schnorr_verify(*g, pub, flipped, sig));
    }
    Signature bumped = sig;
    bumped.s = g->scalar_add(bumped.s, g->scalar_one());
    CHECK_FALSE(schnorr_verify(*g, pub, msg, bumped));
}

TEST_CASE("batch equals AND of single verification on valid batches") {
    auto g = make_toy_group();
    test::Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng.below(64);
        std::vector<BatchItem> items;
        for (size_t i = 0; i < n; ++i) items.push_back(signed_item(*g, rng));
        bool oracle = true;
        for (const BatchItem& it : items)
            oracle = oracle && schnorr_verify(*g, it.pub, it.msg, it.sig);
        REQUIRE(oracle);
        CHECK(batch_verify(*g, items));
    }
}

TEST_CASE("batch rejects a single forgery") {
    auto g = make_toy_group();
    test::Rng rng(505);
    for (int trial = 0; trial < 500; ++trial) {
        size_t n = 1 + rng.below(8);
        std::vector<BatchItem> items;
        for (size_t i = 0; i < n; ++i) items.push_back(signed_item(*g, rng));
        forge(*g, items[rng.below(n)]);
        CHECK_FALSE(batch_verify(*g, items));
    }
}

TEST_CASE("singleton batch agrees with single verify") {
    auto g = make_toy_group();
    test::Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        BatchItem item = signed_item(*g, rng);
        CHECK(batch_verify(*g, {item}) == schnorr_verify(*g, item.pub, item.msg, item.sig));
        forge(*g, item);
        CHECK(batch_verify(*g, {item}) == schnorr_verify(*g, item.pub, item.msg, item.sig));
    }
}

TEST_CASE("batch verify on the standard curve") {
    auto g = make_secp256k1();
    test::Rng rng(707);
    std::vector<BatchItem> items;
    for (size_t i = 0; i < 8; ++i) items.push_back(signed_item(*g, rng));
    CHECK(batch_verify(*g, items));
    forge(*g, items[3]);
    CHECK_FALSE(batch_verify(*g, items));
}

TEST_CASE("batch edge cases") {
    auto g = make_toy_group();
    CHECK_ERRC(batch_verify(*g, {}), Errc::EmptyBatch);
    test::Rng rng(808);
    BatchItem item = signed_item(*g, rng);
    item.pub = g->identity();
    CHECK_ERRC(batch_verify(*g, {item}), Errc::InvalidElement);
}

TEST_CASE("batch verdict is deterministic for fixed input") {
    auto g = make_toy_group();
    test::Rng rng(909);
    std::vector<BatchItem> items;
    for (size_t i = 0; i < 5; ++i) items.push_back(signed_item(*g, rng));
    bool first = batch_verify(*g, items);
    for (int i = 0; i < 5; ++i) CHECK(batch_verify(*g, items) == first);
}
