#include "cvcc/opcount.hpp"

namespace cvcc::metrics {

namespace {
thread_local OpCounters* g_recorder = nullptr;
} // namespace

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Hash: return "hash";
        case OpKind::Xor: return "xor";
        case OpKind::ScalarMul: return "scalar_mul";
        case OpKind::Sign: return "sign";
        case OpKind::Verify: return "verify";
        case OpKind::BatchVerify: return "batch_verify";
    }
    return "?";
}

OpKind op_kind_from_name(const std::string& name) {
    if (name == "hash") return OpKind::Hash;
    if (name == "xor") return OpKind::Xor;
    if (name == "scalar_mul") return OpKind::ScalarMul;
    if (name == "sign") return OpKind::Sign;
    if (name == "verify") return OpKind::Verify;
    if (name == "batch_verify") return OpKind::BatchVerify;
    raise(Errc::UnknownOpKind, "no operation kind named '" + name + "'");
}

uint64_t OpCounters::get(OpKind k) const {
    switch (k) {
        case OpKind::Hash: return hash;
        case OpKind::Xor: return xor_ops;
        case OpKind::ScalarMul: return scalar_mul;
        case OpKind::Sign: return sign;
        case OpKind::Verify: return verify;
        case OpKind::BatchVerify: return batch_verify;
    }
    return 0;
}

OpCounters& OpCounters::operator+=(const OpCounters& o) {
    hash += o.hash;
    xor_ops += o.xor_ops;
    scalar_mul += o.scalar_mul;
    sign += o.sign;
    verify += o.verify;
    batch_verify += o.batch_verify;
    return *this;
}

void record_op(OpCounters& counters, OpKind kind, uint64_t n) {
    switch (kind) {
        case OpKind::Hash: counters.hash += n; return;
        case OpKind::Xor: counters.xor_ops += n; return;
        case OpKind::ScalarMul: counters.scalar_mul += n; return;
        case OpKind::Sign: counters.sign += n; return;
        case OpKind::Verify: counters.verify += n; return;
        case OpKind::BatchVerify: counters.batch_verify += n; return;
    }
    raise(Errc::UnknownOpKind, "unhandled operation kind");
}

OpCounters* current_recorder() { return g_recorder; }

void note_op(OpKind kind, uint64_t n) {
    if (g_recorder != nullptr) record_op(*g_recorder, kind, n);
}

ScopedOpRecorder::ScopedOpRecorder(OpCounters& target) : previous_(g_recorder) {
    g_recorder = &target;
}

ScopedOpRecorder::~ScopedOpRecorder() { g_recorder = previous_; }

} // namespace cvcc::metrics
