#include "cvcc/scenario.hpp"

#include <fstream>
#include <set>

namespace cvcc::sim {

using nlohmann::json;

const char* role_name(Role r) {
    switch (r) {
        case Role::Obu: return "obu";
        case Role::Rsu: return "rsu";
        case Role::Vc: return "vc";
        case Role::Ra: return "ra";
        case Role::Adversary: return "adversary";
        case Role::BaseStation: return "base-station";
    }
    return "?";
}

const char* link_kind_name(LinkKind k) {
    switch (k) {
        case LinkKind::Dsrc: return "dsrc";
        case LinkKind::Wifi: return "wifi";
        case LinkKind::Cellular: return "cellular";
        case LinkKind::Wired: return "wired";
    }
    return "?";
}

namespace {

void expect_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) raise(Errc::ParseError, ctx + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) raise(Errc::ParseError, "unknown key '" + it.key() + "' in " + ctx);
    }
}

Role parse_role(const std::string& s) {
    if (s == "obu") return Role::Obu;
    if (s == "rsu") return Role::Rsu;
    if (s == "vc") return Role::Vc;
    if (s == "ra") return Role::Ra;
    if (s == "adversary") return Role::Adversary;
    if (s == "base-station") return Role::BaseStation;
    raise(Errc::ParseError, "unknown role '" + s + "'");
}

LinkKind parse_link_kind(const std::string& s) {
    if (s == "dsrc") return LinkKind::Dsrc;
    if (s == "wifi") return LinkKind::Wifi;
    if (s == "cellular") return LinkKind::Cellular;
    if (s == "wired") return LinkKind::Wired;
    raise(Errc::ParseError, "unknown link kind '" + s + "'");
}

proto::Channel parse_channel(const std::string& s) {
    if (s == "v2v") return proto::Channel::V2V;
    if (s == "v2r") return proto::Channel::V2R;
    if (s == "r2vc") return proto::Channel::R2VC;
    if (s == "v2vc") return proto::Channel::V2VC;
    raise(Errc::ParseError, "unknown channel '" + s + "'");
}

proto::MsgType parse_msg_type(const std::string& s) {
    if (s == "request") return proto::MsgType::Request;
    if (s == "response") return proto::MsgType::Response;
    if (s == "key-confirm") return proto::MsgType::KeyConfirm;
    if (s == "data") return proto::MsgType::Data;
    raise(Errc::ParseError, "unknown message type '" + s + "'");
}

AdversaryActionKind parse_action_kind(const std::string& s) {
    if (s == "replay") return AdversaryActionKind::Replay;
    if (s == "tamper") return AdversaryActionKind::Tamper;
    if (s == "impersonate") return AdversaryActionKind::Impersonate;
    if (s == "mitm-substitute") return AdversaryActionKind::MitmSubstitute;
    raise(Errc::ParseError, "unknown adversary action '" + s + "'");
}

NodeConfig parse_node(const json& j) {
    expect_keys(j, "node", {"id", "role", "position", "waypoints"});
    NodeConfig n;
    n.id = j.at("id").get<std::string>();
    n.role = parse_role(j.at("role").get<std::string>());
    if (j.contains("position")) {
        const json& p = j.at("position");
        if (!p.is_array() || p.size() != 2) raise(Errc::ParseError, "position must be [x, y]");
        n.x = p[0].get<double>();
        n.y = p[1].get<double>();
    }
    if (j.contains("waypoints")) {
        for (const json& w : j.at("waypoints")) {
            expect_keys(w, "waypoint", {"t_s", "x", "y"});
            n.waypoints.push_back(
                Waypoint{w.at("t_s").get<double>(), w.at("x").get<double>(), w.at("y").get<double>()});
        }
    }
    return n;
}

LinkConfig parse_link(const json& j) {
    expect_keys(j, "link", {"from", "to", "kind", "data_rate_bps", "latency_s", "range_m"});
    LinkConfig l;
    l.from = j.at("from").get<std::string>();
    l.to = j.at("to").get<std::string>();
    l.kind = parse_link_kind(j.at("kind").get<std::string>());
    if (j.contains("data_rate_bps")) l.data_rate_bps = j.at("data_rate_bps").get<double>();
    if (j.contains("latency_s")) l.latency_s = j.at("latency_s").get<double>();
    if (j.contains("range_m")) l.range_m = j.at("range_m").get<double>();
    return l;
}

WorkloadConfig parse_workload(const json& j) {
    expect_keys(j, "workload entry",
                {"node", "peer", "channel", "start_s", "period_s", "count", "payload_bytes",
                 "keywords"});
    WorkloadConfig w;
    w.node = j.at("node").get<std::string>();
    w.peer = j.at("peer").get<std::string>();
    w.channel = parse_channel(j.at("channel").get<std::string>());
    if (j.contains("start_s")) w.start_s = j.at("start_s").get<double>();
    if (j.contains("period_s")) w.period_s = j.at("period_s").get<double>();
    if (j.contains("count")) w.count = j.at("count").get<uint32_t>();
    if (j.contains("payload_bytes")) w.payload_bytes = j.at("payload_bytes").get<uint32_t>();
    if (j.contains("keywords"))
        for (const json& k : j.at("keywords")) w.keywords.push_back(k.get<std::string>());
    return w;
}

AdversaryAction parse_action(const json& j) {
    expect_keys(j, "adversary action",
                {"type", "link", "channel", "msg_type", "occurrence", "delay_s", "bit_index",
                 "at_s", "target", "pid_hex"});
    AdversaryAction a;
    a.kind = parse_action_kind(j.at("type").get<std::string>());
    if (j.contains("link")) {
        const json& l = j.at("link");
        if (!l.is_array() || l.size() != 2) raise(Errc::ParseError, "action link must be [from, to]");
        a.link_from = l[0].get<std::string>();
        a.link_to = l[1].get<std::string>();
    }
    if (j.contains("channel")) a.channel = parse_channel(j.at("channel").get<std::string>());
    if (j.contains("msg_type")) a.msg_type = parse_msg_type(j.at("msg_type").get<std::string>());
    if (j.contains("occurrence")) a.occurrence = j.at("occurrence").get<uint32_t>();
    if (j.contains("delay_s")) a.delay_s = j.at("delay_s").get<double>();
    if (j.contains("bit_index")) a.bit_index = j.at("bit_index").get<uint64_t>();
    if (j.contains("at_s")) a.at_s = j.at("at_s").get<double>();
    if (j.contains("target")) a.target = j.at("target").get<std::string>();
    if (j.contains("pid_hex")) a.pid_hex = j.at("pid_hex").get<std::string>();
    return a;
}

metrics::CostModel parse_cost_model(const json& j) {
    expect_keys(j, "cost_model", {"time_s", "energy_j"});
    metrics::CostModel m = metrics::CostModel::placeholder();
    auto load_map = [](const json& src, std::map<metrics::OpKind, double>& dst) {
        for (auto it = src.begin(); it != src.end(); ++it) {
            metrics::OpKind k;
            try {
                k = metrics::op_kind_from_name(it.key());
            } catch (const Error& e) {
                raise(Errc::ParseError, e.what());
            }
            dst[k] = it.value().get<double>();
        }
    };
    if (j.contains("time_s")) load_map(j.at("time_s"), m.time_s);
    if (j.contains("energy_j")) load_map(j.at("energy_j"), m.energy_j);
    return m;
}

} // namespace

ScenarioConfig parse_config(const json& j) {
    try {
        expect_keys(j, "scenario",
                    {"group", "delta_ms", "duration_s", "nodes", "links", "workload", "adversary",
                     "store", "cost_model"});
        ScenarioConfig cfg;
        if (j.contains("group")) {
            std::string g = j.at("group").get<std::string>();
            if (g == "toy")
                cfg.group = crypto::GroupKind::ToyModP;
            else if (g == "standard-curve")
                cfg.group = crypto::GroupKind::StandardCurve;
            else
                raise(Errc::ParseError, "group must be 'toy' or 'standard-curve'");
        }
        if (j.contains("delta_ms")) cfg.delta_ms = j.at("delta_ms").get<uint64_t>();
        if (j.contains("duration_s")) cfg.duration_s = j.at("duration_s").get<double>();
        for (const json& n : j.at("nodes")) cfg.nodes.push_back(parse_node(n));
        if (j.contains("links"))
            for (const json& l : j.at("links")) cfg.links.push_back(parse_link(l));
        if (j.contains("workload"))
            for (const json& w : j.at("workload")) cfg.workload.push_back(parse_workload(w));
        if (j.contains("adversary")) {
            const json& a = j.at("adversary");
            expect_keys(a, "adversary", {"node", "actions"});
            AdversaryConfig ac;
            ac.node = a.at("node").get<std::string>();
            if (a.contains("actions"))
                for (const json& act : a.at("actions")) ac.actions.push_back(parse_action(act));
            cfg.adversary = std::move(ac);
        }
        if (j.contains("store")) {
            expect_keys(j.at("store"), "store", {"dump"});
            if (j.at("store").contains("dump")) cfg.store.dump = j.at("store").at("dump").get<bool>();
        }
        if (j.contains("cost_model")) cfg.cost_model = parse_cost_model(j.at("cost_model"));
        validate_config(cfg);
        return cfg;
    } catch (const json::exception& e) {
        raise(Errc::ParseError, e.what());
    }
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ParseError, "cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(Errc::ParseError, e.what());
    }
    return parse_config(j);
}

void validate_config(const ScenarioConfig& cfg) {
    if (cfg.duration_s <= 0) raise(Errc::ValidationError, "duration_s must be positive");
    if (cfg.delta_ms == 0) raise(Errc::ValidationError, "delta_ms must be positive");
    if (cfg.nodes.empty()) raise(Errc::ValidationError, "at least one node required");

    std::map<std::string, Role> roles;
    for (const NodeConfig& n : cfg.nodes) {
        if (n.id.empty()) raise(Errc::ValidationError, "node id must be non-empty");
        if (roles.count(n.id)) raise(Errc::ValidationError, "duplicate node id '" + n.id + "'");
        roles[n.id] = n.role;
        double prev = -1;
        for (const Waypoint& w : n.waypoints) {
            if (w.t_s < prev) raise(Errc::ValidationError, "waypoints of '" + n.id + "' not time-sorted");
            prev = w.t_s;
        }
    }

    std::set<std::pair<std::string, std::string>> link_set;
    for (const LinkConfig& l : cfg.links) {
        if (!roles.count(l.from)) raise(Errc::ValidationError, "link endpoint '" + l.from + "' unknown");
        if (!roles.count(l.to)) raise(Errc::ValidationError, "link endpoint '" + l.to + "' unknown");
        if (l.from == l.to) raise(Errc::ValidationError, "link endpoints must differ");
        if (l.data_rate_bps && *l.data_rate_bps <= 0)
            raise(Errc::ValidationError, "data_rate_bps must be positive");
        if (l.latency_s && *l.latency_s < 0) raise(Errc::ValidationError, "latency_s must be >= 0");
        link_set.insert({std::min(l.from, l.to), std::max(l.from, l.to)});
    }

    auto require_link = [&](const std::string& a, const std::string& b, const std::string& what) {
        if (!link_set.count({std::min(a, b), std::max(a, b)}))
            raise(Errc::ValidationError, "no link between '" + a + "' and '" + b + "' for " + what);
    };

    for (const WorkloadConfig& w : cfg.workload) {
        if (!roles.count(w.node)) raise(Errc::ValidationError, "workload node '" + w.node + "' unknown");
        if (!roles.count(w.peer)) raise(Errc::ValidationError, "workload peer '" + w.peer + "' unknown");
        Role sender = roles[w.node];
        Role receiver = roles[w.peer];
        bool ok = false;
        switch (w.channel) {
            case proto::Channel::V2V: ok = sender == Role::Obu && receiver == Role::Obu; break;
            case proto::Channel::V2R: ok = sender == Role::Obu && receiver == Role::Rsu; break;
            case proto::Channel::R2VC: ok = sender == Role::Rsu && receiver == Role::Vc; break;
            case proto::Channel::V2VC: ok = sender == Role::Obu && receiver == Role::Vc; break;
        }
        if (!ok)
            raise(Errc::ValidationError, "channel " + std::string(proto::channel_name(w.channel)) +
                                             " does not connect a " + role_name(sender) + " to a " +
                                             role_name(receiver));
        if (w.count == 0) raise(Errc::ValidationError, "workload count must be positive");
        if (w.period_s <= 0) raise(Errc::ValidationError, "workload period must be positive");
        if (w.payload_bytes >= (1u << 16)) raise(Errc::ValidationError, "payload_bytes too large");
        require_link(w.node, w.peer, "workload");
        if (!w.keywords.empty() &&
            (w.channel == proto::Channel::V2V || w.channel == proto::Channel::V2R))
            raise(Errc::ValidationError, "keyword uploads require a cloud channel");
        for (const std::string& kw : w.keywords)
            if (kw.empty()) raise(Errc::ValidationError, "keywords must be non-empty");
    }

    if (cfg.adversary) {
        const AdversaryConfig& a = *cfg.adversary;
        auto it = roles.find(a.node);
        if (it == roles.end()) raise(Errc::ValidationError, "adversary node '" + a.node + "' unknown");
        if (it->second != Role::Adversary)
            raise(Errc::ValidationError, "adversary node must have role adversary");
        for (const AdversaryAction& act : a.actions) {
            if (act.link_from && !roles.count(*act.link_from))
                raise(Errc::ValidationError, "action link endpoint '" + *act.link_from + "' unknown");
            if (act.link_to && !roles.count(*act.link_to))
                raise(Errc::ValidationError, "action link endpoint '" + *act.link_to + "' unknown");
            if (act.occurrence == 0) raise(Errc::ValidationError, "occurrence is 1-based");
            if (act.kind == AdversaryActionKind::Impersonate) {
                if (act.target.empty() || !roles.count(act.target))
                    raise(Errc::ValidationError, "impersonate needs a known target node");
                if (!act.channel) raise(Errc::ValidationError, "impersonate needs a channel");
                require_link(a.node, act.target, "impersonation");
                if (!act.pid_hex.empty() && act.pid_hex.size() != 64)
                    raise(Errc::ValidationError, "pid_hex must be 64 hex chars");
            }
        }
    }
}

} // namespace cvcc::sim
