#include "cvcc/metrics.hpp"

namespace cvcc::metrics {

CostModel CostModel::placeholder() {
    // ARBITRARY unit costs; composite operations (sign/verify/batch) cost
    // zero here because their primitive counts are posted alongside them.
    CostModel m;
    m.time_s = {{OpKind::Hash, 1e-6}, {OpKind::Xor, 1e-8}, {OpKind::ScalarMul, 1e-3},
                {OpKind::Sign, 0.0},  {OpKind::Verify, 0.0}, {OpKind::BatchVerify, 0.0}};
    m.energy_j = {{OpKind::Hash, 2e-6}, {OpKind::Xor, 2e-8}, {OpKind::ScalarMul, 2e-3},
                  {OpKind::Sign, 0.0},  {OpKind::Verify, 0.0}, {OpKind::BatchVerify, 0.0}};
    return m;
}

double CostModel::op_time(OpKind k) const {
    auto it = time_s.find(k);
    return it == time_s.end() ? 0.0 : it->second;
}

double CostModel::op_energy(OpKind k) const {
    auto it = energy_j.find(k);
    return it == energy_j.end() ? 0.0 : it->second;
}

uint64_t FrameStats::delivered() const { return accepted + rejected_total(); }

uint64_t FrameStats::rejected_total() const {
    uint64_t total = 0;
    for (const auto& [reason, n] : rejected_by_reason) total += n;
    return total;
}

static nlohmann::ordered_json counters_json(const OpCounters& c) {
    return nlohmann::ordered_json{
        {"hash", c.hash},     {"xor", c.xor_ops},     {"scalar_mul", c.scalar_mul},
        {"sign", c.sign},     {"verify", c.verify},   {"batch_verify", c.batch_verify},
    };
}

nlohmann::ordered_json MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["frames"] = {
        {"generated", frames.generated},
        {"accepted", frames.accepted},
        {"rejected_by_reason", frames.rejected_by_reason},
        {"dropped_out_of_range", frames.dropped_out_of_range},
        {"adversary_dropped", frames.adversary_dropped},
    };
    j["sessions"] = {
        {"established", sessions.established},
        {"failed_confirm", sessions.failed_confirm},
    };
    j["bytes_sent_per_channel"] = bytes_sent_per_channel;
    j["storage_bytes"] = storage_bytes;
    j["op_counts"] = nlohmann::ordered_json::object();
    j["op_counts"]["global"] = counters_json(global);
    nlohmann::ordered_json per;
    for (const auto& [node, c] : per_node) per[node] = counters_json(c);
    j["op_counts"]["per_node"] = per.is_null() ? nlohmann::ordered_json::object() : per;
    j["modeled_time_s"] = modeled_time_s;
    j["modeled_energy_j"] = modeled_energy_j;
    j["cost_model_note"] = "unit costs are arbitrary placeholders, not measurements";
    return j;
}

MetricsReport build_report(const std::map<std::string, OpCounters>& per_node,
                           const CostModel& cost,
                           const std::map<std::string, uint64_t>& bytes_per_channel,
                           uint64_t storage_bytes, const FrameStats& frames,
                           const SessionStats& sessions) {
    MetricsReport r;
    r.per_node = per_node;
    for (const auto& [node, c] : per_node) r.global += c;
    r.bytes_sent_per_channel = bytes_per_channel;
    r.storage_bytes = storage_bytes;
    r.frames = frames;
    r.sessions = sessions;

    for (OpKind k : {OpKind::Hash, OpKind::Xor, OpKind::ScalarMul, OpKind::Sign, OpKind::Verify,
                     OpKind::BatchVerify}) {
        double n = static_cast<double>(r.global.get(k));
        r.modeled_time_s += n * cost.op_time(k);
        r.modeled_energy_j += n * cost.op_energy(k);
    }
    return r;
}

} // namespace cvcc::metrics
