#include "cvcc/vc_store.hpp"

#include <istream>
#include <ostream>

#include "cvcc/crypto_ops.hpp"

namespace cvcc::store {

using crypto::hash;

static Digest record_id_for(const Digest& owner_pid, uint64_t t_ms, const Nonce32& nonce) {
    return hash(canon({to_bytes("rid"), ByteView(owner_pid), be64(t_ms), ByteView(nonce)}));
}

EncryptedRecord make_record(const Digest& owner_pid, ByteView payload,
                            const std::vector<Bytes>& keywords, const Digest& data_key,
                            const Digest& k_search, uint64_t t_ms, const Nonce32& nonce) {
    if (keywords.empty()) raise(Errc::EmptyKeywords, "at least one keyword required");
    for (const Bytes& kw : keywords)
        if (kw.size() >= (1u << 16)) raise(Errc::FieldTooLong, "keyword too long");

    EncryptedRecord rec;
    rec.owner_pid = owner_pid;
    rec.t_ms = t_ms;
    rec.nonce = nonce;
    rec.record_id = record_id_for(owner_pid, t_ms, nonce);
    rec.ct = crypto::stream_encrypt(data_key, nonce, payload);
    for (const Bytes& kw : keywords) {
        if (kw.empty()) raise(Errc::EmptyKeyword, "keyword must be non-empty");
        rec.tokens.insert(trapdoor(k_search, kw).token);
    }
    return rec;
}

SearchToken trapdoor(const Digest& k_search, ByteView keyword) {
    if (keyword.empty()) raise(Errc::EmptyKeyword, "keyword must be non-empty");
    return SearchToken{hash(canon({to_bytes("tok"), ByteView(k_search), keyword}))};
}

Bytes make_upload_body(const EncryptedRecord& rec) {
    std::vector<Bytes> fields;
    fields.reserve(6 + rec.tokens.size());
    fields.push_back(to_bytes("up"));
    fields.push_back(to_bytes(ByteView(rec.nonce)));
    fields.push_back(be64(rec.t_ms));
    fields.push_back(to_bytes(ByteView(rec.ct.nonce)));
    fields.push_back(rec.ct.body);
    fields.push_back(to_bytes(rec.ct.tag));
    for (const Digest& tok : rec.tokens) fields.push_back(to_bytes(tok));
    return canon(fields);
}

namespace {

// Shared parser for upload bodies and stored rows. Rows carry the owner pid
// as an extra field right after the tag so the index can be rebuilt.
EncryptedRecord parse_fields(const std::vector<Bytes>& fields, bool with_owner,
                             const Digest* owner_from_frame) {
    size_t fixed = with_owner ? 7u : 6u;
    if (fields.size() < fixed + 1) raise(Errc::MalformedUpload, "too few fields");
    size_t i = 0;
    if (Bytes(fields[i].begin(), fields[i].end()) != to_bytes("up"))
        raise(Errc::MalformedUpload, "missing upload tag");
    ++i;

    EncryptedRecord rec;
    if (with_owner) {
        if (fields[i].size() != 32) raise(Errc::MalformedUpload, "owner pid must be 32 bytes");
        std::copy(fields[i].begin(), fields[i].end(), rec.owner_pid.begin());
        ++i;
    } else {
        rec.owner_pid = *owner_from_frame;
    }

    if (fields[i].size() != 32) raise(Errc::MalformedUpload, "record nonce must be 32 bytes");
    std::copy(fields[i].begin(), fields[i].end(), rec.nonce.begin());
    ++i;
    if (fields[i].size() != 8) raise(Errc::MalformedUpload, "timestamp must be 8 bytes");
    rec.t_ms = read_be64(fields[i], 0);
    ++i;
    if (fields[i].size() != 32) raise(Errc::MalformedUpload, "cipher nonce must be 32 bytes");
    std::copy(fields[i].begin(), fields[i].end(), rec.ct.nonce.begin());
    ++i;
    rec.ct.body = fields[i];
    ++i;
    if (fields[i].size() != 32) raise(Errc::MalformedUpload, "tag must be 32 bytes");
    std::copy(fields[i].begin(), fields[i].end(), rec.ct.tag.begin());
    ++i;

    for (; i < fields.size(); ++i) {
        if (fields[i].size() != 32) raise(Errc::MalformedUpload, "token must be 32 bytes");
        Digest tok;
        std::copy(fields[i].begin(), fields[i].end(), tok.begin());
        rec.tokens.insert(tok);
    }
    if (rec.tokens.empty()) raise(Errc::MalformedUpload, "upload carries no tokens");

    rec.record_id = record_id_for(rec.owner_pid, rec.t_ms, rec.nonce);
    return rec;
}

} // namespace

Digest StoreState::ingest(const proto::VerifiedMessage& verified) {
    if (verified.channel != proto::Channel::R2VC && verified.channel != proto::Channel::V2VC)
        raise(Errc::MalformedUpload, "uploads arrive on R2VC or V2VC only");

    std::vector<Bytes> fields;
    try {
        fields = canon_decode(verified.payload);
    } catch (const Error&) {
        raise(Errc::MalformedUpload, "payload is not a field list");
    }
    EncryptedRecord rec = parse_fields(fields, /*with_owner=*/false, &verified.sender_pid);
    if (records_.count(rec.record_id)) raise(Errc::DuplicateRecordId, "record already stored");
    Digest id = rec.record_id;
    insert(std::move(rec));
    return id;
}

void StoreState::insert(EncryptedRecord rec) {
    Digest id = rec.record_id;
    for (const Digest& tok : rec.tokens) index_[tok].insert(id);
    records_.emplace(id, std::move(rec));
}

std::vector<Digest> StoreState::search(const SearchToken& token) const {
    auto it = index_.find(token.token);
    if (it == index_.end()) return {};
    return std::vector<Digest>(it->second.begin(), it->second.end());
}

Bytes StoreState::retrieve(const Digest& record_id, const Digest& data_key) const {
    auto it = records_.find(record_id);
    if (it == records_.end()) raise(Errc::NotFound, "no record with this id");
    return crypto::stream_decrypt(data_key, it->second.ct);
}

void StoreState::serialize(std::ostream& out) const {
    for (const auto& [id, rec] : records_) {
        std::vector<Bytes> fields;
        fields.reserve(7 + rec.tokens.size());
        fields.push_back(to_bytes("up"));
        fields.push_back(to_bytes(rec.owner_pid));
        fields.push_back(to_bytes(ByteView(rec.nonce)));
        fields.push_back(be64(rec.t_ms));
        fields.push_back(to_bytes(ByteView(rec.ct.nonce)));
        fields.push_back(rec.ct.body);
        fields.push_back(to_bytes(rec.ct.tag));
        for (const Digest& tok : rec.tokens) fields.push_back(to_bytes(tok));
        Bytes row = canon(fields);
        uint32_t len = static_cast<uint32_t>(row.size());
        uint8_t hdr[4] = {static_cast<uint8_t>(len >> 24), static_cast<uint8_t>(len >> 16),
                          static_cast<uint8_t>(len >> 8), static_cast<uint8_t>(len)};
        out.write(reinterpret_cast<const char*>(hdr), 4);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

StoreState StoreState::deserialize(std::istream& in) {
    StoreState st;
    while (true) {
        uint8_t hdr[4];
        in.read(reinterpret_cast<char*>(hdr), 4);
        if (in.gcount() == 0 && in.eof()) break;
        if (in.gcount() != 4) raise(Errc::ParseError, "truncated record length");
        uint32_t len = (static_cast<uint32_t>(hdr[0]) << 24) | (static_cast<uint32_t>(hdr[1]) << 16) |
                       (static_cast<uint32_t>(hdr[2]) << 8) | hdr[3];
        Bytes row(len);
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(len));
        if (static_cast<uint32_t>(in.gcount()) != len) raise(Errc::ParseError, "truncated record row");
        std::vector<Bytes> fields = canon_decode(row);
        EncryptedRecord rec = parse_fields(fields, /*with_owner=*/true, nullptr);
        if (st.records_.count(rec.record_id)) raise(Errc::ParseError, "duplicate record in store file");
        st.insert(std::move(rec));
    }
    return st;
}

size_t StoreState::record_serialized_size(size_t ct_body_len, size_t token_count) {
    // 4-byte length prefix, then canon fields:
    //   "up"(2+2) owner(2+32) nonce(2+32) T(2+8) ct.nonce(2+32) body(2+n) tag(2+32)
    return 4 + 4 + 34 + 34 + 10 + 34 + (2 + ct_body_len) + 34 + token_count * 34;
}

size_t StoreState::serialized_size() const {
    size_t total = 0;
    for (const auto& [id, rec] : records_)
        total += record_serialized_size(rec.ct.body.size(), rec.tokens.size());
    return total;
}

} // namespace cvcc::store
