#pragma once

#include <map>
#include <string>
#include <vector>

#include "cvcc/bytes.hpp"
#include "cvcc/metrics.hpp"
#include "cvcc/scenario.hpp"

namespace cvcc::sim {

// Link timing parameters. Cellular paths relay through a base station, so
// their delivery doubles the latency+serialization formula.
struct LinkModel {
    LinkKind kind = LinkKind::Dsrc;
    double data_rate_bps = 27e6;
    double latency_s = 200e-6;
    double range_m = 300.0;

    static LinkModel defaults(LinkKind kind);
};

// latency + 8*size/rate, doubled on cellular. OutOfRange is reported by the
// world (it owns positions), not here.
double transmit_duration(const LinkModel& link, size_t size_bytes);

struct TraceRecord {
    double t_s = 0;
    std::string src;
    std::string dst;
    Digest frame_hash{};
    std::string outcome;
    // Not serialized; used by metrics and tests.
    size_t size_bytes = 0;
    proto::Channel channel = proto::Channel::V2V;
};

struct TraceLog {
    std::vector<TraceRecord> records;
    std::string to_text() const; // time <tab> src <tab> dst <tab> sha256 <tab> outcome
};

struct OwnerKeys {
    Digest data_key{};
    Digest search_key{};
};

struct RunResult {
    TraceLog trace;
    metrics::MetricsReport report;
    Bytes store_file; // serialized VC store, empty when nothing was ingested
    // Per uploader, the keys its records were written under; lets operators
    // drive `search`/retrieval against the dumped store.
    std::map<std::string, OwnerKeys> owner_keys;
};

// Deterministic: identical (config, seed) produces identical trace bytes and
// report. ConfigInvalid on a config that fails validation; Internal if the
// conservation self-check fails.
RunResult run_scenario(const ScenarioConfig& cfg, uint64_t seed);

} // namespace cvcc::sim
