// Wall-clock benchmarks. These measure this host only;
// the correctness suite relies on operation counts instead.

#include <benchmark/benchmark.h>

#include "cvcc/crypto_ops.hpp"
#include "cvcc/netsim.hpp"
#include "cvcc/schnorr.hpp"
#include "cvcc/stream_cipher.hpp"

using namespace cvcc;

namespace {

crypto::GroupPtr group_for(int64_t arg) {
    return arg == 0 ? crypto::make_toy_group() : crypto::make_secp256k1();
}

std::vector<crypto::BatchItem> signed_batch(const crypto::Group& g, size_t n) {
    std::vector<crypto::BatchItem> items;
    for (size_t i = 0; i < n; ++i) {
        crypto::Scalar x = g.scalar_from_u64(3 + 2 * i);
        if (g.scalar_is_zero(x)) x = g.scalar_one();
        crypto::Scalar k = g.scalar_from_u64(5 + i);
        if (g.scalar_is_zero(k)) k = g.scalar_one();
        Bytes msg = to_bytes("bench message " + std::to_string(i));
        items.push_back({g.scalar_mul(g.generator(), x), msg, crypto::schnorr_sign(g, x, msg, k)});
    }
    return items;
}

void BM_Sha256(benchmark::State& state) {
    Bytes data(static_cast<size_t>(state.range(0)), 0xab);
    for (auto _ : state) benchmark::DoNotOptimize(sha256(data));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(64)->Arg(1024)->Arg(65536);

void BM_SchnorrSign(benchmark::State& state) {
    auto g = group_for(state.range(0));
    crypto::Scalar x = g->scalar_from_u64(7);
    crypto::Scalar k = g->scalar_from_u64(9);
    Bytes msg = to_bytes("bench");
    for (auto _ : state) benchmark::DoNotOptimize(crypto::schnorr_sign(*g, x, msg, k));
}
BENCHMARK(BM_SchnorrSign)->Arg(0)->Arg(1);

void BM_SchnorrVerify(benchmark::State& state) {
    auto g = group_for(state.range(0));
    crypto::Scalar x = g->scalar_from_u64(7);
    crypto::Element pub = g->scalar_mul(g->generator(), x);
    Bytes msg = to_bytes("bench");
    crypto::Signature sig = crypto::schnorr_sign(*g, x, msg, g->scalar_from_u64(9));
    for (auto _ : state) benchmark::DoNotOptimize(crypto::schnorr_verify(*g, pub, msg, sig));
}
BENCHMARK(BM_SchnorrVerify)->Arg(0)->Arg(1);

void BM_BatchVerify(benchmark::State& state) {
    auto g = group_for(state.range(0));
    auto items = signed_batch(*g, static_cast<size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(crypto::batch_verify(*g, items));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_BatchVerify)->Args({0, 16})->Args({0, 64})->Args({1, 16});

void BM_StreamEncrypt(benchmark::State& state) {
    Digest key;
    key.fill(0x11);
    Nonce32 nonce;
    nonce.fill(0x22);
    Bytes pt(static_cast<size_t>(state.range(0)), 0x33);
    for (auto _ : state) benchmark::DoNotOptimize(crypto::stream_encrypt(key, nonce, pt));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StreamEncrypt)->Arg(256)->Arg(4096);

void BM_HonestScenario(benchmark::State& state) {
    sim::ScenarioConfig cfg = sim::load_config(std::string(CVCC_SCENARIO_DIR) + "/honest-v2r.json");
    uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg, seed++));
}
BENCHMARK(BM_HonestScenario);

} // namespace

BENCHMARK_MAIN();
