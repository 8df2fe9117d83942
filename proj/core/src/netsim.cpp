#include "cvcc/netsim.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <queue>
#include <sstream>

#include "cvcc/crypto_ops.hpp"
#include "cvcc/vc_store.hpp"

namespace cvcc::sim {

using proto::Channel;
using proto::MessageFrame;
using proto::MsgType;

// ---------------------------------------------------------------------------
// Link model
// ---------------------------------------------------------------------------

LinkModel LinkModel::defaults(LinkKind kind) {
    switch (kind) {
        case LinkKind::Dsrc:
            return LinkModel{kind, 27e6, 200e-6, 300.0}; // range has no standard constant; configurable
        case LinkKind::Wifi:
            return LinkModel{kind, 54e6, 0.0, 140.0};
        case LinkKind::Cellular:
            // latency is drawn per link from [1.5, 3.5] s by the seeded RNG
            return LinkModel{kind, 2e6, 1.5, 1e9};
        case LinkKind::Wired:
            return LinkModel{kind, 1e9, 1e-3, 1e12};
    }
    raise(Errc::Internal, "unknown link kind");
}

double transmit_duration(const LinkModel& link, size_t size_bytes) {
    if (size_bytes == 0) raise(Errc::ValidationError, "frame size must be positive");
    double one_hop = link.latency_s + (8.0 * static_cast<double>(size_bytes)) / link.data_rate_bps;
    // Cellular data passes through a base station: two hops end to end.
    return link.kind == LinkKind::Cellular ? 2.0 * one_hop : one_hop;
}

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64)
// ---------------------------------------------------------------------------

namespace {

struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// ---------------------------------------------------------------------------
// World state
// ---------------------------------------------------------------------------

enum class EventKind { Deliver, Generate, AdversaryAct, Move };

struct Event {
    double t = 0;
    uint64_t seq = 0;
    EventKind kind = EventKind::Deliver;
    // Deliver / AdversaryAct
    Bytes frame;
    std::string src;
    std::string dst;
    size_t link_index = 0;
    // Generate
    size_t workload_index = 0;
    // AdversaryAct
    size_t action_index = 0;
    // Move
    std::string node;
    size_t waypoint_index = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct PendingRequest {
    uint64_t t_ms = 0;
    Nonce32 nonce{};
    Digest secret{};      // mk on infrastructure channels
    bool is_v2v = false;  // V2V derives the secret from the response cert
};

struct NodeState {
    NodeConfig cfg;
    double pos_x = 0;
    double pos_y = 0;
    uint64_t nonce_counter = 0;
    uint64_t last_t_ms = 0; // senders never reuse a timestamp

    // OBU
    std::optional<proto::TpdRecord> tpd;
    std::optional<proto::LoginState> session;

    // RSU
    std::optional<proto::RsuSecret> rsu;

    // receiving state
    std::optional<proto::ReceiverContext> rx;
    std::optional<proto::ReplayCache> replay;

    // VC
    std::optional<store::StoreState> vc_store;

    // request/response bookkeeping, keyed by (peer node, channel)
    std::map<std::pair<std::string, uint8_t>, std::deque<PendingRequest>> pending_requests;
    // Outstanding session keys awaiting a key-confirm; several exchanges
    // with one peer can be in flight on a slow link.
    std::map<std::pair<std::string, uint8_t>, std::deque<proto::SessionKey>> pending_confirms;
};

struct ActionState {
    uint64_t matches_seen = 0;
    bool fired = false;
};

class World {
public:
    World(const ScenarioConfig& cfg, uint64_t seed);
    RunResult run();

private:
    void build_nodes();
    void build_links();
    void schedule_initial_events();

    uint64_t now_ms() const { return static_cast<uint64_t>(std::llround(now_ * 1000.0)); }
    // Frame timestamp for a sender: wall reading, bumped so one sender never
    // reuses a (pid, T) pair — the receiver-side replay cache would eat the
    // second frame of a same-millisecond exchange otherwise.
    uint64_t stamp(NodeState& n);
    Nonce32 next_nonce(NodeState& n);
    Bytes filler_payload(NodeState& n, uint32_t len);

    NodeState& node(const std::string& id);
    double dist(const NodeState& a, const NodeState& b) const;
    void update_position(NodeState& n) const;

    int find_link(const std::string& a, const std::string& b) const;
    void push(Event e);

    // One trace line per frame fate.
    void trace(double t, const std::string& src, const std::string& dst, const Bytes& frame,
               const std::string& outcome, Channel channel);

    // True if the frame went on the air (a Deliver event was scheduled).
    bool send_frame(const std::string& src, const std::string& dst, Bytes frame, Channel channel,
                    std::optional<size_t> link_override = {});
    bool adversary_intercepts(const Event& deliver);

    void handle_generate(const Event& e);
    void handle_deliver(const Event& e);
    void handle_adversary(const Event& e);
    void handle_move(const Event& e);

    void deliver_to_node(const Event& e, NodeState& dst);
    void on_request(NodeState& dst, const proto::VerifiedMessage& msg, const Event& e);
    void on_response(NodeState& dst, const proto::VerifiedMessage& msg, const Event& e);
    std::string on_confirm(NodeState& dst, const proto::VerifiedMessage& msg);

    Bytes craft_impersonation(const AdversaryAction& act);

    std::string node_for_pid(const Digest& pid) const;

    const ScenarioConfig& cfg_;
    uint64_t seed_;
    SplitMix64 rng_;
    proto::RaRegistry registry_;
    std::map<std::string, NodeState> nodes_;
    std::vector<std::pair<LinkConfig, LinkModel>> links_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    uint64_t seq_ = 0;
    double now_ = 0;

    std::map<std::string, metrics::OpCounters> counters_;
    std::map<std::string, uint64_t> bytes_per_channel_;
    metrics::FrameStats frames_;
    metrics::SessionStats sessions_;
    TraceLog trace_;
    std::map<Digest, std::string> pid_to_node_;
    std::vector<ActionState> action_state_;
    std::string adversary_id_;
};

World::World(const ScenarioConfig& cfg, uint64_t seed) : cfg_(cfg), seed_(seed), rng_(seed) {
    try {
        validate_config(cfg_);
    } catch (const Error& e) {
        raise(Errc::ConfigInvalid, e.what());
    }

    Nonce32 ra_seed = sha256(canon({to_bytes("scenario-seed"), be64(seed_)}));
    auto group = crypto::make_group(cfg_.group);
    registry_.params = proto::ra_init(ra_seed, group, cfg_.delta_ms);

    build_nodes();
    build_links();
    if (cfg_.adversary) {
        adversary_id_ = cfg_.adversary->node;
        action_state_.resize(cfg_.adversary->actions.size());
    }
    schedule_initial_events();
}

void World::build_nodes() {
    uint64_t cert_expiry =
        static_cast<uint64_t>(std::llround(cfg_.duration_s * 1000.0)) + 3'600'000;
    for (const NodeConfig& nc : cfg_.nodes) {
        NodeState n;
        n.cfg = nc;
        n.pos_x = nc.x;
        n.pos_y = nc.y;
        if (!nc.waypoints.empty()) {
            n.pos_x = nc.waypoints.front().x;
            n.pos_y = nc.waypoints.front().y;
        }
        metrics::ScopedOpRecorder rec(counters_[nc.id]);
        switch (nc.role) {
            case Role::Obu: {
                std::string pw = "pw:" + nc.id;
                n.tpd = proto::register_vehicle(registry_, to_bytes(nc.id), to_bytes(pw), cert_expiry);
                n.session = proto::login(*n.tpd, to_bytes(nc.id), to_bytes(pw));
                n.rx = proto::vehicle_receiver(*n.session, registry_.revoked);
                n.replay = proto::ReplayCache(cfg_.delta_ms);
                pid_to_node_[n.session->pid] = nc.id;
                break;
            }
            case Role::Rsu: {
                n.rsu = proto::register_rsu(registry_.params, to_bytes(nc.id));
                n.rx = proto::rsu_receiver(registry_.params, *n.rsu);
                n.replay = proto::ReplayCache(cfg_.delta_ms);
                pid_to_node_[n.rsu->rsu_id] = nc.id;
                break;
            }
            case Role::Vc: {
                n.rx = proto::vc_receiver(registry_.params);
                n.replay = proto::ReplayCache(cfg_.delta_ms);
                n.vc_store = store::StoreState{};
                pid_to_node_[proto::vc_identity()] = nc.id;
                break;
            }
            case Role::Ra:
            case Role::Adversary:
            case Role::BaseStation:
                break;
        }
        nodes_.emplace(nc.id, std::move(n));
    }
}

void World::build_links() {
    for (const LinkConfig& lc : cfg_.links) {
        LinkModel m = LinkModel::defaults(lc.kind);
        if (lc.kind == LinkKind::Cellular) {
            // One draw per link, fixed for the whole run.
            m.latency_s = 1.5 + 2.0 * rng_.uniform01();
        }
        if (lc.data_rate_bps) m.data_rate_bps = *lc.data_rate_bps;
        if (lc.latency_s) m.latency_s = *lc.latency_s;
        if (lc.range_m) m.range_m = *lc.range_m;
        links_.emplace_back(lc, m);
    }
}

void World::schedule_initial_events() {
    for (size_t wi = 0; wi < cfg_.workload.size(); ++wi) {
        const WorkloadConfig& w = cfg_.workload[wi];
        for (uint32_t i = 0; i < w.count; ++i) {
            double t = w.start_s + static_cast<double>(i) * w.period_s;
            if (t > cfg_.duration_s) break;
            Event e;
            e.t = t;
            e.kind = EventKind::Generate;
            e.workload_index = wi;
            push(std::move(e));
        }
    }
    for (const NodeConfig& nc : cfg_.nodes) {
        for (size_t i = 0; i < nc.waypoints.size(); ++i) {
            Event e;
            e.t = nc.waypoints[i].t_s;
            e.kind = EventKind::Move;
            e.node = nc.id;
            e.waypoint_index = i;
            push(std::move(e));
        }
    }
    if (cfg_.adversary) {
        for (size_t ai = 0; ai < cfg_.adversary->actions.size(); ++ai) {
            const AdversaryAction& a = cfg_.adversary->actions[ai];
            if (a.kind == AdversaryActionKind::Impersonate) {
                Event e;
                e.t = a.at_s;
                e.kind = EventKind::AdversaryAct;
                e.action_index = ai;
                push(std::move(e));
            }
        }
    }
}

void World::push(Event e) {
    e.seq = seq_++;
    queue_.push(std::move(e));
}

NodeState& World::node(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) raise(Errc::Internal, "unknown node '" + id + "'");
    return it->second;
}

void World::update_position(NodeState& n) const {
    const auto& wps = n.cfg.waypoints;
    if (wps.empty()) return;
    double t = now_;
    if (t <= wps.front().t_s) {
        n.pos_x = wps.front().x;
        n.pos_y = wps.front().y;
        return;
    }
    if (t >= wps.back().t_s) {
        n.pos_x = wps.back().x;
        n.pos_y = wps.back().y;
        return;
    }
    for (size_t i = 0; i + 1 < wps.size(); ++i) {
        if (t >= wps[i].t_s && t <= wps[i + 1].t_s) {
            double span = wps[i + 1].t_s - wps[i].t_s;
            double f = span > 0 ? (t - wps[i].t_s) / span : 0.0;
            n.pos_x = wps[i].x + f * (wps[i + 1].x - wps[i].x);
            n.pos_y = wps[i].y + f * (wps[i + 1].y - wps[i].y);
            return;
        }
    }
}

double World::dist(const NodeState& a, const NodeState& b) const {
    double dx = a.pos_x - b.pos_x;
    double dy = a.pos_y - b.pos_y;
    return std::sqrt(dx * dx + dy * dy);
}

int World::find_link(const std::string& a, const std::string& b) const {
    for (size_t i = 0; i < links_.size(); ++i) {
        const LinkConfig& lc = links_[i].first;
        if ((lc.from == a && lc.to == b) || (lc.from == b && lc.to == a))
            return static_cast<int>(i);
    }
    return -1;
}

uint64_t World::stamp(NodeState& n) {
    uint64_t t = now_ms();
    if (t <= n.last_t_ms) t = n.last_t_ms + 1;
    n.last_t_ms = t;
    return t;
}

Nonce32 World::next_nonce(NodeState& n) {
    return sha256(canon({to_bytes("nonce"), to_bytes(n.cfg.id), be64(seed_),
                         be64(n.nonce_counter++)}));
}

Bytes World::filler_payload(NodeState& n, uint32_t len) {
    Bytes out;
    uint64_t block = 0;
    while (out.size() < len) {
        Digest d = sha256(canon({to_bytes("payload"), to_bytes(n.cfg.id), be64(seed_),
                                 be64(n.nonce_counter), be64(block++)}));
        append(out, ByteView(d.data(), std::min<size_t>(32, len - out.size())));
    }
    return out;
}

void World::trace(double t, const std::string& src, const std::string& dst, const Bytes& frame,
                  const std::string& outcome, Channel channel) {
    TraceRecord r;
    r.t_s = t;
    r.src = src;
    r.dst = dst;
    r.frame_hash = sha256(frame);
    r.outcome = outcome;
    r.size_bytes = frame.size();
    r.channel = channel;
    trace_.records.push_back(std::move(r));
}

// Queue a transmission. Every call accounts one generated frame whose fate
// is exactly one of delivered (verify outcome), out-of-range, or
// adversary-dropped. Adversary re-injections reuse the victim link's model
// via link_override, with the adversary's own position as origin.
bool World::send_frame(const std::string& src, const std::string& dst, Bytes frame,
                       Channel channel, std::optional<size_t> link_override) {
    frames_.generated += 1;
    bytes_per_channel_[proto::channel_name(channel)] += frame.size();

    size_t li;
    if (link_override) {
        li = *link_override;
    } else {
        int found = find_link(src, dst);
        if (found < 0) raise(Errc::Internal, "no link for transmission " + src + "->" + dst);
        li = static_cast<size_t>(found);
    }
    const LinkModel& lm = links_[li].second;

    NodeState& s = node(src);
    NodeState& d = node(dst);
    update_position(s);
    update_position(d);
    if (dist(s, d) > lm.range_m) {
        frames_.dropped_out_of_range += 1;
        trace(now_, src, dst, frame, "dropped-out-of-range", channel);
        return false;
    }

    Event e;
    e.t = now_ + transmit_duration(lm, frame.size());
    e.kind = EventKind::Deliver;
    e.frame = std::move(frame);
    e.src = src;
    e.dst = dst;
    e.link_index = li;
    push(std::move(e));
    return true;
}

RunResult World::run() {
    // Generate events are bounded by duration_s at scheduling time; frames
    // already in flight drain to completion so conservation holds.
    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        if (e.t < now_) raise(Errc::Internal, "event clock went backwards");
        now_ = e.t;
        switch (e.kind) {
            case EventKind::Generate: handle_generate(e); break;
            case EventKind::Deliver: handle_deliver(e); break;
            case EventKind::AdversaryAct: handle_adversary(e); break;
            case EventKind::Move: handle_move(e); break;
        }
    }

    // Conservation self-check.
    uint64_t fates = frames_.delivered() + frames_.dropped_out_of_range + frames_.adversary_dropped;
    if (fates != frames_.generated)
        raise(Errc::Internal, "frame conservation violated: " + std::to_string(frames_.generated) +
                                  " generated vs " + std::to_string(fates) + " fates");

    uint64_t storage = 0;
    Bytes store_file;
    std::map<std::string, OwnerKeys> owner_keys;
    for (auto& [id, n] : nodes_) {
        if (n.session)
            owner_keys[id] = OwnerKeys{proto::owner_data_key(n.session->v),
                                       proto::owner_search_key(n.session->v)};
        else if (n.rsu)
            owner_keys[id] = OwnerKeys{proto::owner_data_key(n.rsu->k_infra),
                                       proto::owner_search_key(n.rsu->k_infra)};
        if (n.vc_store && n.vc_store->record_count() > 0) {
            std::ostringstream os;
            n.vc_store->serialize(os);
            std::string s = os.str();
            storage += s.size();
            store_file.insert(store_file.end(), s.begin(), s.end());
        }
    }

    RunResult result;
    result.trace = std::move(trace_);
    result.report = metrics::build_report(
        counters_, cfg_.cost_model ? *cfg_.cost_model : metrics::CostModel::placeholder(),
        bytes_per_channel_, storage, frames_, sessions_);
    result.store_file = std::move(store_file);
    result.owner_keys = std::move(owner_keys);
    return result;
}

// ---------------------------------------------------------------------------
// Event handlers
// ---------------------------------------------------------------------------

void World::handle_move(const Event& e) {
    NodeState& n = node(e.node);
    const Waypoint& w = n.cfg.waypoints.at(e.waypoint_index);
    n.pos_x = w.x;
    n.pos_y = w.y;
}

void World::handle_generate(const Event& e) {
    const WorkloadConfig& w = cfg_.workload.at(e.workload_index);
    NodeState& sender = node(w.node);
    metrics::ScopedOpRecorder rec(counters_[w.node]);

    uint64_t t_ms = stamp(sender);
    Nonce32 nonce = next_nonce(sender);

    Bytes payload;
    if (!w.keywords.empty()) {
        // Encrypted record upload: the uploader derives its owner keys,
        // builds the record, and ships the upload body as the payload.
        Digest owner_secret{};
        Digest owner_pid{};
        if (sender.session) {
            owner_secret = sender.session->v;
            owner_pid = sender.session->pid;
        } else if (sender.rsu) {
            owner_secret = sender.rsu->k_infra;
            owner_pid = sender.rsu->rsu_id;
        }
        std::vector<Bytes> kws;
        for (const std::string& kw : w.keywords) kws.push_back(to_bytes(kw));
        Bytes record_payload = filler_payload(sender, w.payload_bytes);
        store::EncryptedRecord rec_obj = store::make_record(
            owner_pid, record_payload, kws, proto::owner_data_key(owner_secret),
            proto::owner_search_key(owner_secret), t_ms, next_nonce(sender));
        payload = store::make_upload_body(rec_obj);
    } else {
        payload = filler_payload(sender, w.payload_bytes);
    }

    MessageFrame frame;
    PendingRequest pending;
    pending.t_ms = t_ms;
    pending.nonce = nonce;

    if (w.channel == Channel::R2VC) {
        frame = proto::make_rsu_request(*sender.rsu, payload, t_ms, nonce);
        pending.secret = sender.rsu->k_infra;
    } else {
        Digest scope{};
        if (w.channel == Channel::V2R)
            scope = node(w.peer).rsu->rsu_id;
        else if (w.channel == Channel::V2VC)
            scope = proto::vc_identity();
        frame = proto::make_request(*sender.session, w.channel, payload, t_ms, nonce, scope);
        if (w.channel == Channel::V2V)
            pending.is_v2v = true;
        else
            pending.secret = proto::vehicle_link_key(*sender.session, scope);
    }

    if (send_frame(w.node, w.peer, proto::encode_frame(frame), w.channel))
        sender.pending_requests[{w.peer, static_cast<uint8_t>(w.channel)}].push_back(pending);
}

bool World::adversary_intercepts(const Event& deliver) {
    if (!cfg_.adversary) return false;
    Channel ch = static_cast<Channel>(deliver.frame.size() > 2 ? deliver.frame[2] : 0);
    MsgType mt = static_cast<MsgType>(deliver.frame.size() > 1 ? deliver.frame[1] : 0);

    for (size_t ai = 0; ai < cfg_.adversary->actions.size(); ++ai) {
        const AdversaryAction& act = cfg_.adversary->actions[ai];
        ActionState& st = action_state_[ai];
        if (act.kind == AdversaryActionKind::Impersonate || st.fired) continue;
        if (deliver.src == adversary_id_) continue; // do not intercept own frames
        if (act.link_from && *act.link_from != deliver.src) continue;
        if (act.link_to && *act.link_to != deliver.dst) continue;
        if (act.channel && *act.channel != ch) continue;
        if (act.msg_type && *act.msg_type != mt) continue;
        st.matches_seen += 1;
        if (st.matches_seen != act.occurrence) continue;

        if (act.kind == AdversaryActionKind::Replay) {
            // Passive capture: the original is delivered untouched and a
            // copy is re-injected later.
            st.fired = true;
            Event copy;
            copy.t = deliver.t + act.delay_s;
            copy.kind = EventKind::AdversaryAct;
            copy.action_index = ai;
            copy.frame = deliver.frame;
            copy.src = adversary_id_;
            copy.dst = deliver.dst;
            copy.link_index = deliver.link_index;
            push(std::move(copy));
            return false;
        }

        // In-flight interception: the original frame never reaches the
        // receiver; the adversary forwards its own bytes instead.
        st.fired = true;
        frames_.adversary_dropped += 1;
        trace(deliver.t, deliver.src, deliver.dst, deliver.frame, "adversary-dropped", ch);

        Bytes forged = deliver.frame;
        if (act.kind == AdversaryActionKind::Tamper) {
            uint64_t bit = act.bit_index % (forged.size() * 8);
            forged[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        } else { // MitmSubstitute: replace the nonce field, bytes [43, 75)
            if (forged.size() >= 75) {
                Digest sub = sha256(canon({to_bytes("eve-nonce"), ByteView(forged.data() + 43, 32)}));
                std::copy(sub.begin(), sub.end(), forged.begin() + 43);
            }
        }

        Event fwd;
        fwd.t = deliver.t; // on-the-wire substitution, no added delay
        fwd.kind = EventKind::AdversaryAct;
        fwd.action_index = ai;
        fwd.frame = std::move(forged);
        fwd.src = adversary_id_;
        fwd.dst = deliver.dst;
        fwd.link_index = deliver.link_index;
        push(std::move(fwd));
        return true;
    }
    return false;
}

void World::handle_adversary(const Event& e) {
    const AdversaryAction& act = cfg_.adversary->actions.at(e.action_index);

    if (act.kind == AdversaryActionKind::Impersonate) {
        Bytes frame = craft_impersonation(act);
        send_frame(adversary_id_, act.target, std::move(frame),
                   act.channel.value_or(Channel::V2R));
        return;
    }

    // Replay / forwarded interception: inject the stored bytes over the
    // victim link's medium.
    Channel ch = static_cast<Channel>(e.frame.size() > 2 ? e.frame[2] : 0);
    send_frame(adversary_id_, e.dst, e.frame, ch, e.link_index);
}

Bytes World::craft_impersonation(const AdversaryAction& act) {
    const auto& group = *registry_.params.pub->group;
    Channel ch = *act.channel;

    Digest pid{};
    if (!act.pid_hex.empty()) {
        Bytes raw = hex_decode(act.pid_hex);
        std::copy(raw.begin(), raw.end(), pid.begin());
    } else {
        // Claim the first registered honest identity the wire would show.
        if (!pid_to_node_.empty()) pid = pid_to_node_.begin()->first;
    }

    MessageFrame f;
    f.type = MsgType::Request;
    f.channel = ch;
    f.sender_pid = pid;
    f.timestamp_ms = now_ms();
    f.nonce = sha256(canon({to_bytes("eve"), be64(rng_.next())}));
    f.payload = to_bytes("bogus");

    if (ch == Channel::V2V) {
        // Self-made keypair and certificate: the frame signature verifies
        // under the forged certificate, the chain check has to catch it.
        crypto::Scalar x = proto::nonzero_scalar(
            group, sha256(canon({to_bytes("eve-key"), be64(rng_.next())})), "eve");
        crypto::Element pub = group.scalar_mul(group.generator(), x);
        proto::Certificate cert;
        cert.pid = pid;
        cert.pub = pub;
        cert.expiry_ms = f.timestamp_ms + 3'600'000;
        cert.ra_sig = crypto::Signature{
            group.scalar_from_digest(sha256(canon({to_bytes("eve-sig-e"), be64(rng_.next())}))),
            group.scalar_from_digest(sha256(canon({to_bytes("eve-sig-s"), be64(rng_.next())})))};
        crypto::Scalar k = proto::nonzero_scalar(
            group, sha256(canon({to_bytes("eve-k"), be64(rng_.next())})), "eve");
        crypto::Signature sig = crypto::schnorr_sign(group, x, proto::frame_auth_input(f), k);
        auto sig_bytes = sig.to_bytes(group);
        f.auth.assign(sig_bytes.begin(), sig_bytes.end());
        f.cert = cert;
    } else {
        Digest mac = sha256(canon({to_bytes("eve-mac"), be64(rng_.next())}));
        f.auth.assign(mac.begin(), mac.end());
    }
    return proto::encode_frame(f);
}

void World::handle_deliver(const Event& e) {
    if (adversary_intercepts(e)) return;
    deliver_to_node(e, node(e.dst));
}

void World::deliver_to_node(const Event& e, NodeState& dst) {
    Channel ch = static_cast<Channel>(e.frame.size() > 2 ? e.frame[2] : 0);
    if (!dst.rx || !dst.replay) {
        frames_.rejected_by_reason["BadAuthenticator"] += 1;
        trace(now_, e.src, e.dst, e.frame, "BadAuthenticator", ch);
        return;
    }

    metrics::ScopedOpRecorder rec(counters_[e.dst]);
    proto::VerifiedMessage msg;
    try {
        msg = proto::verify_request_bytes(*dst.rx, e.frame, now_ms(), *dst.replay);
    } catch (const Error& err) {
        frames_.rejected_by_reason[errc_name(err.code())] += 1;
        trace(now_, e.src, e.dst, e.frame, errc_name(err.code()), ch);
        return;
    }

    std::string outcome = "accepted";
    switch (msg.type) {
        case MsgType::Request: on_request(dst, msg, e); break;
        case MsgType::Response: on_response(dst, msg, e); break;
        case MsgType::KeyConfirm: outcome = on_confirm(dst, msg); break;
        case MsgType::Data: break;
    }

    if (outcome == "accepted") {
        frames_.accepted += 1;
    } else {
        frames_.rejected_by_reason[outcome] += 1;
    }
    trace(now_, e.src, e.dst, e.frame, outcome, msg.channel);
}

void World::on_request(NodeState& dst, const proto::VerifiedMessage& msg, const Event& e) {
    // Cloud channels: try to ingest the payload as an encrypted record.
    if (dst.vc_store && (msg.channel == Channel::R2VC || msg.channel == Channel::V2VC)) {
        try {
            dst.vc_store->ingest(msg);
        } catch (const Error&) {
            // Authenticated frame whose payload is not an upload; nothing stored.
        }
    }

    std::string requester = node_for_pid(msg.sender_pid);
    if (requester.empty()) return;

    uint64_t t_ms = stamp(dst);
    Nonce32 nonce_r = next_nonce(dst);

    MessageFrame response;
    proto::SessionKey sk;
    if (msg.channel == Channel::V2V) {
        if (!dst.session || !msg.sender_pub) return;
        Digest secret = proto::v2v_shared_secret(*dst.session->pub->group, dst.session->x,
                                                 *msg.sender_pub);
        sk = proto::derive_session_key(secret, msg.nonce, nonce_r, msg.timestamp_ms,
                                       msg.sender_pid);
        response = proto::make_vehicle_frame(*dst.session, MsgType::Response, Channel::V2V,
                                             msg.nonce, t_ms, nonce_r, msg.sender_pid);
    } else {
        if (!msg.link_key) return;
        sk = proto::derive_session_key(*msg.link_key, msg.nonce, nonce_r, msg.timestamp_ms,
                                       msg.sender_pid);
        response = proto::make_mac_frame(*msg.link_key, dst.rx->self_id, MsgType::Response,
                                         msg.channel, msg.nonce, t_ms, nonce_r);
    }

    dst.pending_confirms[{requester, static_cast<uint8_t>(msg.channel)}].push_back(sk);
    send_frame(e.dst, requester, proto::encode_frame(response), msg.channel);
}

void World::on_response(NodeState& dst, const proto::VerifiedMessage& msg, const Event& e) {
    std::string responder = node_for_pid(msg.sender_pid);
    if (responder.empty()) return;

    auto key = std::make_pair(responder, static_cast<uint8_t>(msg.channel));
    auto it = dst.pending_requests.find(key);
    if (it == dst.pending_requests.end()) return;
    // The response payload echoes the request nonce; match on it.
    auto match = it->second.end();
    for (auto p = it->second.begin(); p != it->second.end(); ++p) {
        if (msg.payload.size() == p->nonce.size() &&
            std::equal(p->nonce.begin(), p->nonce.end(), msg.payload.begin())) {
            match = p;
            break;
        }
    }
    if (match == it->second.end()) return; // unmatched response
    PendingRequest pending = *match;
    it->second.erase(match);

    Digest secret;
    if (pending.is_v2v) {
        if (!dst.session || !msg.sender_pub) return;
        secret = proto::v2v_shared_secret(*dst.session->pub->group, dst.session->x,
                                          *msg.sender_pub);
    } else {
        secret = pending.secret;
    }
    proto::SessionKey sk = proto::derive_session_key(secret, pending.nonce, msg.nonce,
                                                     pending.t_ms, msg.sender_pid);

    uint64_t t_ms = stamp(dst);
    Nonce32 nonce_c = next_nonce(dst);
    Digest confirm = proto::confirm_payload(sk, t_ms);

    MessageFrame frame;
    if (msg.channel == Channel::V2V) {
        frame = proto::make_vehicle_frame(*dst.session, MsgType::KeyConfirm, Channel::V2V,
                                          confirm, t_ms, nonce_c, msg.sender_pid);
    } else if (dst.session) {
        Digest mk = pending.secret;
        frame = proto::make_mac_frame(mk, dst.session->pid, MsgType::KeyConfirm, msg.channel,
                                      confirm, t_ms, nonce_c);
    } else if (dst.rsu) {
        frame = proto::make_mac_frame(pending.secret, dst.rsu->rsu_id, MsgType::KeyConfirm,
                                      msg.channel, confirm, t_ms, nonce_c);
    } else {
        return;
    }
    send_frame(e.dst, responder, proto::encode_frame(frame), msg.channel);
}

std::string World::on_confirm(NodeState& dst, const proto::VerifiedMessage& msg) {
    std::string requester = node_for_pid(msg.sender_pid);
    auto it = dst.pending_confirms.find({requester, static_cast<uint8_t>(msg.channel)});
    if (it == dst.pending_confirms.end() || it->second.empty())
        return "accepted"; // no session awaited
    for (auto p = it->second.begin(); p != it->second.end(); ++p) {
        bool match = true;
        try {
            proto::check_key_confirm(*p, msg);
        } catch (const Error&) {
            match = false;
        }
        if (match) {
            sessions_.established += 1;
            it->second.erase(p);
            return "accepted";
        }
    }
    sessions_.failed_confirm += 1;
    return "ConfirmMismatch";
}

std::string World::node_for_pid(const Digest& pid) const {
    auto it = pid_to_node_.find(pid);
    return it == pid_to_node_.end() ? std::string{} : it->second;
}

} // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

std::string TraceLog::to_text() const {
    std::string out;
    char line[160];
    for (const TraceRecord& r : records) {
        std::snprintf(line, sizeof(line), "%.9f\t", r.t_s);
        out += line;
        out += r.src;
        out += '\t';
        out += r.dst;
        out += '\t';
        out += hex_encode(r.frame_hash);
        out += '\t';
        out += r.outcome;
        out += '\n';
    }
    return out;
}

RunResult run_scenario(const ScenarioConfig& cfg, uint64_t seed) {
    World world(cfg, seed);
    return world.run();
}

} // namespace cvcc::sim
