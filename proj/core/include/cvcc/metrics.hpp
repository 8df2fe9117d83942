#pragma once

#include <map>
#include <string>

#include "cvcc/opcount.hpp"

#include "json.hpp"

namespace cvcc::metrics {

// Per-operation unit costs. The defaults are ARBITRARY placeholders that
// keep the comparison structure (which flow performs fewer expensive
// operations) without pretending to be hardware measurements.
struct CostModel {
    std::map<OpKind, double> time_s;
    std::map<OpKind, double> energy_j;

    static CostModel placeholder();
    double op_time(OpKind k) const;
    double op_energy(OpKind k) const;
};

struct FrameStats {
    uint64_t generated = 0;
    uint64_t accepted = 0;
    std::map<std::string, uint64_t> rejected_by_reason;
    uint64_t dropped_out_of_range = 0;
    uint64_t adversary_dropped = 0;

    uint64_t delivered() const;
    uint64_t rejected_total() const;
};

struct SessionStats {
    uint64_t established = 0;
    uint64_t failed_confirm = 0;
};

struct MetricsReport {
    OpCounters global;
    std::map<std::string, OpCounters> per_node;
    std::map<std::string, uint64_t> bytes_sent_per_channel;
    uint64_t storage_bytes = 0;
    double modeled_time_s = 0.0;
    double modeled_energy_j = 0.0;
    FrameStats frames;
    SessionStats sessions;

    nlohmann::ordered_json to_json() const;
};

// Folds per-node counters and applies the cost model. Pure over its inputs.
MetricsReport build_report(const std::map<std::string, OpCounters>& per_node,
                           const CostModel& cost,
                           const std::map<std::string, uint64_t>& bytes_per_channel,
                           uint64_t storage_bytes, const FrameStats& frames,
                           const SessionStats& sessions);

} // namespace cvcc::metrics
