#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvcc/group.hpp"
#include "cvcc/metrics.hpp"
#include "cvcc/protocol.hpp"

#include "json.hpp"

namespace cvcc::sim {

enum class Role { Obu, Rsu, Vc, Ra, Adversary, BaseStation };
enum class LinkKind { Dsrc, Wifi, Cellular, Wired };

const char* role_name(Role r);
const char* link_kind_name(LinkKind k);

struct Waypoint {
    double t_s = 0;
    double x = 0;
    double y = 0;
};

struct NodeConfig {
    std::string id;
    Role role = Role::Obu;
    double x = 0;
    double y = 0;
    std::vector<Waypoint> waypoints;
};

struct LinkConfig {
    std::string from;
    std::string to;
    LinkKind kind = LinkKind::Dsrc;
    std::optional<double> data_rate_bps;
    std::optional<double> latency_s;
    std::optional<double> range_m;
};

// One periodic message schedule. Non-empty keywords turn each request into
// an encrypted record upload (V2VC/R2VC).
struct WorkloadConfig {
    std::string node;
    std::string peer;
    proto::Channel channel = proto::Channel::V2R;
    double start_s = 0;
    double period_s = 1.0;
    uint32_t count = 1;
    uint32_t payload_bytes = 32;
    std::vector<std::string> keywords;
};

enum class AdversaryActionKind { Replay, Tamper, Impersonate, MitmSubstitute };

// Script entries reference only wire-observable bytes (link endpoints and
// the fixed-offset type/channel header bytes); the adversary never holds an
// honest secret.
struct AdversaryAction {
    AdversaryActionKind kind = AdversaryActionKind::Replay;
    std::optional<std::string> link_from;
    std::optional<std::string> link_to;
    std::optional<proto::Channel> channel;
    std::optional<proto::MsgType> msg_type;
    uint32_t occurrence = 1; // 1-based index among matching transmissions
    double delay_s = 0.05;   // replay re-injection delay
    uint64_t bit_index = 0;  // tamper: bit to flip, modulo frame length
    double at_s = 0;         // impersonate injection time
    std::string target;      // impersonate destination node
    std::string pid_hex;     // impersonate claimed pid; empty = copy observed
};

struct AdversaryConfig {
    std::string node;
    std::vector<AdversaryAction> actions;
};

struct StoreOptions {
    bool dump = false; // write the VC store next to the trace
};

struct ScenarioConfig {
    crypto::GroupKind group = crypto::GroupKind::ToyModP;
    uint64_t delta_ms = 300;
    double duration_s = 10.0;
    std::vector<NodeConfig> nodes;
    std::vector<LinkConfig> links;
    std::vector<WorkloadConfig> workload;
    std::optional<AdversaryConfig> adversary;
    StoreOptions store;
    std::optional<metrics::CostModel> cost_model;
};

// Strict parse: unknown keys and type mismatches are ParseError; semantic
// violations (duplicate ids, dangling endpoints, role/channel mismatches)
// are ValidationError naming the offender.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
void validate_config(const ScenarioConfig& cfg);

} // namespace cvcc::sim
