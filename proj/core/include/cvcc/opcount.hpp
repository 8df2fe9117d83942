#pragma once

#include <cstdint>
#include <string>

#include "cvcc/errors.hpp"

namespace cvcc::metrics {

enum class OpKind { Hash, Xor, ScalarMul, Sign, Verify, BatchVerify };

constexpr int kOpKindCount = 6;

const char* op_kind_name(OpKind k);
OpKind op_kind_from_name(const std::string& name); // UnknownOpKind

// Per-node cryptographic operation tallies. Counts are cost-model units:
// each public crypto operation posts the term count of its defining formula
// (one schnorr_verify posts 2 scalar multiplications, a batch of n posts
// n+2), independent of how the arithmetic is scheduled internally.
struct OpCounters {
    uint64_t hash = 0;
    uint64_t xor_ops = 0;
    uint64_t scalar_mul = 0;
    uint64_t sign = 0;
    uint64_t verify = 0;
    uint64_t batch_verify = 0;

    uint64_t get(OpKind k) const;
    OpCounters& operator+=(const OpCounters& o);
    bool operator==(const OpCounters&) const = default;
};

void record_op(OpCounters& counters, OpKind kind, uint64_t n = 1);

// Crypto primitives post their counts to whichever counter is installed on
// the calling thread; with none installed the notification is a no-op, so
// the primitives stay pure functions of their inputs.
OpCounters* current_recorder();
void note_op(OpKind kind, uint64_t n = 1);

class ScopedOpRecorder {
public:
    explicit ScopedOpRecorder(OpCounters& target);
    ~ScopedOpRecorder();
    ScopedOpRecorder(const ScopedOpRecorder&) = delete;
    ScopedOpRecorder& operator=(const ScopedOpRecorder&) = delete;

private:
    OpCounters* previous_;
};

} // namespace cvcc::metrics
