#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "cvcc/bytes.hpp"
#include "cvcc/group.hpp"
#include "cvcc/schnorr.hpp"

namespace cvcc::proto {

using crypto::Element;
using crypto::Group;
using crypto::GroupPtr;
using crypto::Scalar;
using crypto::Signature;

// ---------------------------------------------------------------------------
// System parameters and registration
// ---------------------------------------------------------------------------

// Everything a deployed OBU/RSU may know about the authority.
struct SystemPublic {
    GroupPtr group;
    Element ra_public;   // X_RA = sG
    uint64_t delta_ms;   // freshness window
};

struct SystemParams {
    std::shared_ptr<const SystemPublic> pub;
    Scalar master_secret;

    std::array<uint8_t, 32> secret_bytes() const { return pub->group->scalar_bytes(master_secret); }
};

// Deterministic setup from a seed: s = H(canon("ra", seed)) mod q, re-hashed
// while zero. InvalidGroup on a null group or delta == 0.
SystemParams ra_init(const Nonce32& seed, GroupPtr group, uint64_t delta_ms);

// Exact: B is the full 32-byte verifier, login is deterministic.
// Fuzzy: B is reduced mod 2^8, so a stolen record leaves ~2^8 password
// candidates per dictionary instead of confirming one.
enum class VerifierMode { Exact, Fuzzy };

struct Certificate {
    Digest pid{};
    Element pub;          // vehicle verification key X = xG
    uint64_t expiry_ms = 0;
    Signature ra_sig;

    Bytes signing_bytes() const; // canon("cert", pid, enc(X), be64(expiry))
    Bytes encode() const;
    static Certificate decode(const Group& g, ByteView data); // ParseError
    bool operator==(const Certificate&) const = default;
};

// Per-vehicle material installed at registration. The secrets V and x are
// stored only under the password-derived pad.
struct TpdRecord {
    std::shared_ptr<const SystemPublic> pub; // OBU-side public parameters
    Digest pid{};
    Digest masked_v{};   // A = V xor H(canon("mask", ID, PW))
    Bytes verifier;      // B (32 bytes exact, 1 byte fuzzy)
    VerifierMode mode = VerifierMode::Exact;
    Digest masked_x{};   // scalar bytes of x under the same pad
    Certificate cert;
};

struct RsuSecret {
    Digest rsu_id{};   // H(canon("rsu", raw id))
    Digest k_infra{};  // H(canon("infra", rsu_id, s))
};

// RA-side bookkeeping: issued identities and revocations.
struct RaRegistry {
    SystemParams params;
    std::map<Bytes, Digest> id_to_pid;
    std::shared_ptr<std::set<Digest>> revoked = std::make_shared<std::set<Digest>>();
};

TpdRecord register_vehicle(RaRegistry& ra, ByteView id, ByteView pw, uint64_t expiry_ms,
                           VerifierMode mode = VerifierMode::Exact); // EmptyCredential
RsuSecret register_rsu(const SystemParams& params, ByteView rsu_id_raw); // EmptyCredential

// Derivations shared between issuer and verifier sides.
Digest derive_pid(ByteView id, ByteView s_bytes);
Digest derive_v(const Digest& pid, ByteView s_bytes);
Digest mask_pad(ByteView id, ByteView pw);
Digest login_verifier(ByteView id, ByteView pw, const Digest& v);
Scalar derive_signing_key(const Group& g, const Digest& v);
Digest derive_k_infra(const Digest& rsu_id, ByteView s_bytes);
Digest link_key(const Digest& v, const Digest& receiver_scope); // mk
Digest owner_data_key(const Digest& owner_secret);
Digest owner_search_key(const Digest& owner_secret);
Digest vc_identity(); // the cloud's fixed wire identity

// Reduce a digest to a nonzero scalar, re-hashing under `tag` while zero.
Scalar nonzero_scalar(const Group& g, Digest d, std::string_view tag);

// ---------------------------------------------------------------------------
// Login
// ---------------------------------------------------------------------------

struct LoginState {
    std::shared_ptr<const SystemPublic> pub;
    Digest pid{};
    Digest v{};
    Scalar x;
    Certificate cert;
    bool active = false;
};

// Recovers V from the pad, checks the verifier, unmasks x. BadCredentials on
// any mismatch; no retry state is kept.
LoginState login(const TpdRecord& tpd, ByteView id, ByteView pw);

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

enum class MsgType : uint8_t { Request = 0x01, Response = 0x02, KeyConfirm = 0x03, Data = 0x04 };
enum class Channel : uint8_t { V2V = 0x01, V2R = 0x02, R2VC = 0x03, V2VC = 0x04 };

const char* channel_name(Channel c);

// Wire unit. Big-endian throughout:
//   version(1) type(1) channel(1) sender_pid(32) T(8) nonce(32)
//   payload_len(2) payload auth[64|32] [certificate, V2V only]
// V2V frames are signed and always carry the sender's certificate; the
// infrastructure channels carry a 32-byte MAC.
struct MessageFrame {
    uint8_t version = 0x01;
    MsgType type = MsgType::Request;
    Channel channel = Channel::V2V;
    Digest sender_pid{};
    uint64_t timestamp_ms = 0;
    Nonce32 nonce{};
    Bytes payload;
    Bytes auth;
    std::optional<Certificate> cert;
};

inline constexpr size_t kFrameHeaderSize = 77; // through payload_len
inline constexpr size_t kSignatureAuthSize = 64;
inline constexpr size_t kMacAuthSize = 32;

Bytes encode_frame(const MessageFrame& f);
MessageFrame decode_frame(const Group& g, ByteView wire); // ParseError
Bytes frame_auth_input(const MessageFrame& f);            // canon of covered fields

// ---------------------------------------------------------------------------
// Sending
// ---------------------------------------------------------------------------

// mk for a vehicle talking to `receiver_scope` (rsu id or VC id).
Digest vehicle_link_key(const LoginState& state, const Digest& receiver_scope);

// Vehicle-originated frame on any channel. V2V signs with the vehicle key
// (deterministic per-message nonce) and attaches the certificate; V2R/V2VC
// MAC under mk. NotLoggedIn / PayloadTooLong / ValidationError(R2VC).
MessageFrame make_request(const LoginState& state, Channel channel, ByteView payload,
                          uint64_t t_ms, const Nonce32& nonce, const Digest& receiver_scope);

// Same construction with an explicit message type (responses, key-confirm).
MessageFrame make_vehicle_frame(const LoginState& state, MsgType type, Channel channel,
                                ByteView payload, uint64_t t_ms, const Nonce32& nonce,
                                const Digest& receiver_scope);

// RSU-originated R2VC frame, MAC keyed by k_infra.
MessageFrame make_rsu_request(const RsuSecret& rsu, ByteView payload, uint64_t t_ms,
                              const Nonce32& nonce);

// Infrastructure response/confirm under an established link key.
MessageFrame make_mac_frame(const Digest& mac_key, const Digest& sender_id, MsgType type,
                            Channel channel, ByteView payload, uint64_t t_ms, const Nonce32& nonce);

// ---------------------------------------------------------------------------
// Receiving
// ---------------------------------------------------------------------------

class ReplayCache {
public:
    explicit ReplayCache(uint64_t horizon_ms) : horizon_ms_(horizon_ms) {}

    // False if (pid, t) was already accepted inside the horizon.
    bool check_and_insert(const Digest& pid, uint64_t t_ms, uint64_t now_ms);
    size_t size() const { return entries_.size(); }

private:
    void prune(uint64_t now_ms);

    uint64_t horizon_ms_;
    std::set<std::pair<Digest, uint64_t>> entries_;
};

// Verification material, by receiver role:
//   vehicle: own_v (re-derives mk for responses addressed to it)
//   rsu:     own_k_infra + ra_derivation
//   vc:      ra_derivation
// ra_derivation is the RA-issued derivation secret that lets deployed
// infrastructure recompute per-vehicle material from a pseudo-identity.
struct ReceiverContext {
    std::shared_ptr<const SystemPublic> pub;
    Digest self_id{};
    std::optional<Digest> own_v;
    std::optional<Digest> own_k_infra;
    std::optional<std::array<uint8_t, 32>> ra_derivation;
    std::shared_ptr<const std::set<Digest>> revoked;
};

ReceiverContext vehicle_receiver(const LoginState& state,
                                 std::shared_ptr<const std::set<Digest>> revoked = nullptr);
ReceiverContext rsu_receiver(const SystemParams& params, const RsuSecret& rsu);
ReceiverContext vc_receiver(const SystemParams& params);

struct VerifiedMessage {
    Digest sender_pid{};
    MsgType type = MsgType::Request;
    Channel channel = Channel::V2V;
    Bytes payload;
    uint64_t timestamp_ms = 0;
    Nonce32 nonce{};
    std::optional<Digest> link_key;    // infrastructure channels
    std::optional<Element> sender_pub; // V2V
};

// Checks run in a fixed order: freshness, replay, authenticator, then (V2V)
// certificate validity and expiry. Errors: StaleTimestamp, ReplayDetected,
// BadAuthenticator, BadCertificate, ExpiredCertificate.
VerifiedMessage verify_request(const ReceiverContext& rx, const MessageFrame& frame,
                               uint64_t now_ms, ReplayCache& cache);

// Wire-level entry: frames that do not parse are authentication failures.
VerifiedMessage verify_request_bytes(const ReceiverContext& rx, ByteView wire, uint64_t now_ms,
                                     ReplayCache& cache);

// ---------------------------------------------------------------------------
// Session keys
// ---------------------------------------------------------------------------

struct SessionKey {
    Digest key{};
    uint64_t established_at_ms = 0;
    Digest peer_pid{};
};

// key = H(canon("SK", secret, nonce_sender, nonce_receiver, be64(T))). Both
// ends feed the same inputs in an honest run.
SessionKey derive_session_key(ByteView local_secret, const Nonce32& nonce_sender,
                              const Nonce32& nonce_receiver, uint64_t t_ms,
                              const Digest& peer_pid = Digest{});

// V2V shared secret: H(canon("dh", enc(x_local * X_peer))).
Digest v2v_shared_secret(const Group& g, const Scalar& x_local, const Element& peer_pub);

// Key-confirm payload H(canon("confirm", key, be64(T))); the receiver
// recomputes it over its own session key. ConfirmMismatch on disagreement.
Digest confirm_payload(const SessionKey& sk, uint64_t t_ms);
void check_key_confirm(const SessionKey& sk, const VerifiedMessage& msg);

} // namespace cvcc::proto
