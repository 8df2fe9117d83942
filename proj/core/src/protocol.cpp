#include "cvcc/protocol.hpp"

#include "cvcc/crypto_ops.hpp"

namespace cvcc::proto {

using crypto::hash;

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

Scalar nonzero_scalar(const Group& g, Digest d, std::string_view tag) {
    Scalar s = g.scalar_from_digest(d);
    while (g.scalar_is_zero(s)) {
        d = hash(canon({to_bytes(tag), ByteView(d)}));
        s = g.scalar_from_digest(d);
    }
    return s;
}

Digest derive_pid(ByteView id, ByteView s_bytes) {
    return hash(canon({to_bytes("pid"), id, s_bytes}));
}

Digest derive_v(const Digest& pid, ByteView s_bytes) {
    return hash(canon({to_bytes("v"), ByteView(pid), s_bytes}));
}

Digest mask_pad(ByteView id, ByteView pw) { return hash(canon({to_bytes("mask"), id, pw})); }

Digest login_verifier(ByteView id, ByteView pw, const Digest& v) {
    return hash(canon({to_bytes("ver"), id, pw, ByteView(v)}));
}

Scalar derive_signing_key(const Group& g, const Digest& v) {
    return nonzero_scalar(g, hash(canon({to_bytes("sk"), ByteView(v)})), "sk");
}

Digest derive_k_infra(const Digest& rsu_id, ByteView s_bytes) {
    return hash(canon({to_bytes("infra"), ByteView(rsu_id), s_bytes}));
}

Digest link_key(const Digest& v, const Digest& receiver_scope) {
    return hash(canon({to_bytes("link"), ByteView(v), ByteView(receiver_scope)}));
}

Digest owner_data_key(const Digest& owner_secret) {
    return hash(canon({to_bytes("dk"), ByteView(owner_secret)}));
}

Digest owner_search_key(const Digest& owner_secret) {
    return hash(canon({to_bytes("sk2"), ByteView(owner_secret)}));
}

Digest vc_identity() { return sha256(canon({to_bytes("vc-id")})); }

// ---------------------------------------------------------------------------
// Setup and registration
// ---------------------------------------------------------------------------

SystemParams ra_init(const Nonce32& seed, GroupPtr group, uint64_t delta_ms) {
    if (!group) raise(Errc::InvalidGroup, "group required");
    if (delta_ms == 0) raise(Errc::InvalidGroup, "freshness window must be positive");

    Scalar s = nonzero_scalar(*group, hash(canon({to_bytes("ra"), ByteView(seed)})), "ra");
    Element ra_public = crypto::scalar_mul(*group, group->generator(), s);
    auto pub = std::make_shared<SystemPublic>(SystemPublic{std::move(group), ra_public, delta_ms});
    return SystemParams{std::move(pub), s};
}

static Certificate issue_certificate(const SystemParams& params, const Digest& pid,
                                     const Element& pub_key, uint64_t expiry_ms) {
    Certificate cert;
    cert.pid = pid;
    cert.pub = pub_key;
    cert.expiry_ms = expiry_ms;
    const Group& g = *params.pub->group;
    Bytes msg = cert.signing_bytes();
    Digest kd = hash(canon({to_bytes("k"), to_bytes(params.secret_bytes()), msg}));
    Scalar k = nonzero_scalar(g, kd, "k");
    cert.ra_sig = crypto::schnorr_sign(g, params.master_secret, msg, k);
    return cert;
}

TpdRecord register_vehicle(RaRegistry& ra, ByteView id, ByteView pw, uint64_t expiry_ms,
                           VerifierMode mode) {
    if (id.empty() || pw.empty()) raise(Errc::EmptyCredential, "identity and password required");

    const SystemParams& params = ra.params;
    const Group& g = *params.pub->group;
    auto s_bytes = params.secret_bytes();

    TpdRecord tpd;
    tpd.pub = params.pub;
    tpd.mode = mode;
    tpd.pid = derive_pid(id, s_bytes);
    Digest v = derive_v(tpd.pid, s_bytes);
    Digest pad = mask_pad(id, pw);
    tpd.masked_v = crypto::xor_op(v, pad);

    Digest b = login_verifier(id, pw, v);
    if (mode == VerifierMode::Exact)
        tpd.verifier.assign(b.begin(), b.end());
    else
        tpd.verifier.assign(1, b[31]); // reduced mod 2^8

    Scalar x = derive_signing_key(g, v);
    tpd.masked_x = crypto::xor_op(g.scalar_bytes(x), pad);

    Element pub_key = crypto::scalar_mul(g, g.generator(), x);
    tpd.cert = issue_certificate(params, tpd.pid, pub_key, expiry_ms);

    ra.id_to_pid[to_bytes(id)] = tpd.pid;
    return tpd;
}

RsuSecret register_rsu(const SystemParams& params, ByteView rsu_id_raw) {
    if (rsu_id_raw.empty()) raise(Errc::EmptyCredential, "rsu id required");
    RsuSecret rsu;
    rsu.rsu_id = hash(canon({to_bytes("rsu"), rsu_id_raw}));
    rsu.k_infra = derive_k_infra(rsu.rsu_id, to_bytes(params.secret_bytes()));
    return rsu;
}

// ---------------------------------------------------------------------------
// Login
// ---------------------------------------------------------------------------

LoginState login(const TpdRecord& tpd, ByteView id, ByteView pw) {
    Digest pad = mask_pad(id, pw);
    Digest v = crypto::xor_op(tpd.masked_v, pad);
    Digest b = login_verifier(id, pw, v);

    bool ok = false;
    if (tpd.mode == VerifierMode::Exact)
        ok = tpd.verifier.size() == 32 && std::equal(b.begin(), b.end(), tpd.verifier.begin());
    else
        ok = tpd.verifier.size() == 1 && tpd.verifier[0] == b[31];
    if (!ok) raise(Errc::BadCredentials, "identity or password incorrect");

    LoginState state;
    state.pub = tpd.pub;
    state.pid = tpd.pid;
    state.v = v;
    Digest x_bytes = crypto::xor_op(tpd.masked_x, pad);
    state.x = tpd.pub->group->scalar_from_be(ByteView(x_bytes));
    state.cert = tpd.cert;
    state.active = true;
    return state;
}

// ---------------------------------------------------------------------------
// Sending
// ---------------------------------------------------------------------------

Digest vehicle_link_key(const LoginState& state, const Digest& receiver_scope) {
    return link_key(state.v, receiver_scope);
}

static Bytes mac_over(const Digest& mac_key, const MessageFrame& f) {
    uint8_t type = static_cast<uint8_t>(f.type);
    uint8_t channel = static_cast<uint8_t>(f.channel);
    Digest mac = hash(canon({to_bytes("mac"), ByteView(mac_key), ByteView(&f.version, 1),
                             ByteView(&type, 1), ByteView(&channel, 1), ByteView(f.sender_pid),
                             be64(f.timestamp_ms), ByteView(f.nonce), f.payload}));
    return to_bytes(mac);
}

MessageFrame make_vehicle_frame(const LoginState& state, MsgType type, Channel channel,
                                ByteView payload, uint64_t t_ms, const Nonce32& nonce,
                                const Digest& receiver_scope) {
    if (!state.active) raise(Errc::NotLoggedIn, "login required before sending");
    if (payload.size() >= (1u << 16)) raise(Errc::PayloadTooLong, "payload exceeds 2^16-1 bytes");
    if (channel == Channel::R2VC)
        raise(Errc::ValidationError, "R2VC frames originate at an RSU");

    MessageFrame f;
    f.type = type;
    f.channel = channel;
    f.sender_pid = state.pid;
    f.timestamp_ms = t_ms;
    f.nonce = nonce;
    f.payload = to_bytes(payload);

    if (channel == Channel::V2V) {
        const Group& g = *state.pub->group;
        Bytes msg = frame_auth_input(f);
        Digest kd = hash(canon({to_bytes("k"), to_bytes(g.scalar_bytes(state.x)), msg}));
        Scalar k = nonzero_scalar(g, kd, "k");
        Signature sig = crypto::schnorr_sign(g, state.x, msg, k);
        auto sig_bytes = sig.to_bytes(g);
        f.auth.assign(sig_bytes.begin(), sig_bytes.end());
        f.cert = state.cert;
    } else {
        Digest mk = vehicle_link_key(state, receiver_scope);
        f.auth = mac_over(mk, f);
    }
    return f;
}

MessageFrame make_request(const LoginState& state, Channel channel, ByteView payload,
                          uint64_t t_ms, const Nonce32& nonce, const Digest& receiver_scope) {
    return make_vehicle_frame(state, MsgType::Request, channel, payload, t_ms, nonce,
                              receiver_scope);
}

MessageFrame make_rsu_request(const RsuSecret& rsu, ByteView payload, uint64_t t_ms,
                              const Nonce32& nonce) {
    return make_mac_frame(rsu.k_infra, rsu.rsu_id, MsgType::Request, Channel::R2VC, payload, t_ms,
                          nonce);
}

MessageFrame make_mac_frame(const Digest& mac_key, const Digest& sender_id, MsgType type,
                            Channel channel, ByteView payload, uint64_t t_ms,
                            const Nonce32& nonce) {
    if (payload.size() >= (1u << 16)) raise(Errc::PayloadTooLong, "payload exceeds 2^16-1 bytes");
    if (channel == Channel::V2V) raise(Errc::ValidationError, "V2V frames are signed, not MACed");

    MessageFrame f;
    f.type = type;
    f.channel = channel;
    f.sender_pid = sender_id;
    f.timestamp_ms = t_ms;
    f.nonce = nonce;
    f.payload = to_bytes(payload);
    f.auth = mac_over(mac_key, f);
    return f;
}

// ---------------------------------------------------------------------------
// Receiving
// ---------------------------------------------------------------------------

bool ReplayCache::check_and_insert(const Digest& pid, uint64_t t_ms, uint64_t now_ms) {
    prune(now_ms);
    auto [it, inserted] = entries_.emplace(pid, t_ms);
    (void)it;
    return inserted;
}

void ReplayCache::prune(uint64_t now_ms) {
    uint64_t floor = now_ms > horizon_ms_ ? now_ms - horizon_ms_ : 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second < floor)
            it = entries_.erase(it);
        else
            ++it;
    }
}

ReceiverContext vehicle_receiver(const LoginState& state,
                                 std::shared_ptr<const std::set<Digest>> revoked) {
    ReceiverContext rx;
    rx.pub = state.pub;
    rx.self_id = state.pid;
    rx.own_v = state.v;
    rx.revoked = std::move(revoked);
    return rx;
}

ReceiverContext rsu_receiver(const SystemParams& params, const RsuSecret& rsu) {
    ReceiverContext rx;
    rx.pub = params.pub;
    rx.self_id = rsu.rsu_id;
    rx.own_k_infra = rsu.k_infra;
    rx.ra_derivation = params.secret_bytes();
    return rx;
}

ReceiverContext vc_receiver(const SystemParams& params) {
    ReceiverContext rx;
    rx.pub = params.pub;
    rx.self_id = vc_identity();
    rx.ra_derivation = params.secret_bytes();
    return rx;
}

// Resolve the MAC key an incoming infrastructure frame must carry.
static Digest resolve_mac_key(const ReceiverContext& rx, const MessageFrame& f) {
    if (f.channel == Channel::R2VC) {
        if (f.sender_pid == vc_identity() && rx.own_k_infra)
            return *rx.own_k_infra; // RSU side: the cloud answered under our key
        if (rx.ra_derivation) // VC side: re-derive the sender RSU's key
            return derive_k_infra(f.sender_pid, to_bytes(*rx.ra_derivation));
        if (rx.own_k_infra)
            return *rx.own_k_infra;
    } else {
        if (rx.own_v) // vehicle side: response from the scope we addressed
            return link_key(*rx.own_v, f.sender_pid);
        if (rx.ra_derivation) // infrastructure side: re-derive the vehicle's V
            return link_key(derive_v(f.sender_pid, to_bytes(*rx.ra_derivation)), rx.self_id);
    }
    raise(Errc::Internal, "receiver lacks material for this channel");
}

VerifiedMessage verify_request(const ReceiverContext& rx, const MessageFrame& frame,
                               uint64_t now_ms, ReplayCache& cache) {
    const Group& g = *rx.pub->group;
    uint64_t delta = rx.pub->delta_ms;

    // 1. freshness
    uint64_t age = now_ms >= frame.timestamp_ms ? now_ms - frame.timestamp_ms
                                                : frame.timestamp_ms - now_ms;
    if (age > delta) raise(Errc::StaleTimestamp, "timestamp outside freshness window");

    // 2. replay
    if (!cache.check_and_insert(frame.sender_pid, frame.timestamp_ms, now_ms))
        raise(Errc::ReplayDetected, "sender and timestamp already seen");

    VerifiedMessage out;
    out.sender_pid = frame.sender_pid;
    out.type = frame.type;
    out.channel = frame.channel;
    out.payload = frame.payload;
    out.timestamp_ms = frame.timestamp_ms;
    out.nonce = frame.nonce;

    // 3. authenticator, then certificate chain on the peer channel
    if (frame.channel == Channel::V2V) {
        if (!frame.cert) raise(Errc::BadCertificate, "V2V frame without certificate");
        const Certificate& cert = *frame.cert;
        if (frame.auth.size() != kSignatureAuthSize)
            raise(Errc::BadAuthenticator, "signature has wrong size");
        Signature sig = Signature::from_bytes(g, frame.auth);
        // schnorr_verify validates the key first; an undecodable X in a
        // crafted certificate is an authenticator failure here.
        bool sig_ok = false;
        try {
            sig_ok = crypto::schnorr_verify(g, cert.pub, frame_auth_input(frame), sig);
        } catch (const Error&) {
            sig_ok = false;
        }
        if (!sig_ok) raise(Errc::BadAuthenticator, "frame signature invalid");

        if (cert.pid != frame.sender_pid)
            raise(Errc::BadCertificate, "certificate pid does not match sender");
        if (rx.revoked && rx.revoked->count(frame.sender_pid))
            raise(Errc::BadCertificate, "sender revoked");
        if (!crypto::schnorr_verify(g, rx.pub->ra_public, cert.signing_bytes(), cert.ra_sig))
            raise(Errc::BadCertificate, "certificate not signed by the authority");
        if (cert.expiry_ms < now_ms) raise(Errc::ExpiredCertificate, "certificate expired");

        out.sender_pub = cert.pub;
    } else {
        if (frame.auth.size() != kMacAuthSize)
            raise(Errc::BadAuthenticator, "mac has wrong size");
        Digest key = resolve_mac_key(rx, frame);
        if (mac_over(key, frame) != frame.auth)
            raise(Errc::BadAuthenticator, "mac mismatch");
        out.link_key = key;
    }
    return out;
}

VerifiedMessage verify_request_bytes(const ReceiverContext& rx, ByteView wire, uint64_t now_ms,
                                     ReplayCache& cache) {
    MessageFrame frame;
    try {
        frame = decode_frame(*rx.pub->group, wire);
    } catch (const Error&) {
        // Bytes that do not parse as a frame cannot authenticate.
        raise(Errc::BadAuthenticator, "frame does not parse");
    }
    return verify_request(rx, frame, now_ms, cache);
}

// ---------------------------------------------------------------------------
// Session keys
// ---------------------------------------------------------------------------

SessionKey derive_session_key(ByteView local_secret, const Nonce32& nonce_sender,
                              const Nonce32& nonce_receiver, uint64_t t_ms,
                              const Digest& peer_pid) {
    SessionKey sk;
    sk.key = hash(canon({to_bytes("SK"), local_secret, ByteView(nonce_sender),
                         ByteView(nonce_receiver), be64(t_ms)}));
    sk.established_at_ms = t_ms;
    sk.peer_pid = peer_pid;
    return sk;
}

Digest v2v_shared_secret(const Group& g, const Scalar& x_local, const Element& peer_pub) {
    if (!g.is_valid(peer_pub) || peer_pub == g.identity())
        raise(Errc::InvalidElement, "peer public key invalid");
    Element shared = crypto::scalar_mul(g, peer_pub, x_local);
    return hash(canon({to_bytes("dh"), shared.enc}));
}

Digest confirm_payload(const SessionKey& sk, uint64_t t_ms) {
    return hash(canon({to_bytes("confirm"), ByteView(sk.key), be64(t_ms)}));
}

void check_key_confirm(const SessionKey& sk, const VerifiedMessage& msg) {
    if (msg.type != MsgType::KeyConfirm) raise(Errc::ConfirmMismatch, "not a key-confirm frame");
    Digest expected = confirm_payload(sk, msg.timestamp_ms);
    if (msg.payload.size() != expected.size() ||
        !std::equal(expected.begin(), expected.end(), msg.payload.begin()))
        raise(Errc::ConfirmMismatch, "session keys disagree");
}

} // namespace cvcc::proto
