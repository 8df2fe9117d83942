#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "cvcc/bytes.hpp"
#include "cvcc/protocol.hpp"
#include "cvcc/stream_cipher.hpp"

namespace cvcc::store {

using crypto::CipherText;

// Ciphertext record plus its keyword trapdoors. The cloud only ever sees
// the encrypted body and the keyed token set, never a keyword.
struct EncryptedRecord {
    Digest record_id{};  // H(canon("rid", owner_pid, be64(T), nonce))
    Digest owner_pid{};
    uint64_t t_ms = 0;
    Nonce32 nonce{};
    CipherText ct;
    std::set<Digest> tokens;
};

struct SearchToken {
    Digest token{};
    bool operator==(const SearchToken&) const = default;
};

// EmptyKeywords / FieldTooLong. Deterministic in all inputs.
EncryptedRecord make_record(const Digest& owner_pid, ByteView payload,
                            const std::vector<Bytes>& keywords, const Digest& data_key,
                            const Digest& k_search, uint64_t t_ms, const Nonce32& nonce);

// token = H(canon("tok", k_search, keyword)). EmptyKeyword.
SearchToken trapdoor(const Digest& k_search, ByteView keyword);

// Upload body carried in R2VC/V2VC request payloads:
//   canon("up", nonce, be64(T), ct.nonce, ct.body, ct.tag, token_1..token_n)
// Tokens are computed by the uploader, sorted for a canonical encoding.
Bytes make_upload_body(const EncryptedRecord& rec);

class StoreState {
public:
    // Insert a record parsed from a verified R2VC/V2VC upload. The caller
    // guarantees the frame authenticated; this only parses and stores.
    // MalformedUpload / DuplicateRecordId (store unchanged on either).
    Digest ingest(const proto::VerifiedMessage& verified);

    // Exactly the ids carrying the token, sorted; unknown token -> empty.
    std::vector<Digest> search(const SearchToken& token) const;

    // NotFound / TagMismatch.
    Bytes retrieve(const Digest& record_id, const Digest& data_key) const;

    size_t record_count() const { return records_.size(); }
    const std::map<Digest, EncryptedRecord>& records() const { return records_; }

    // Single append-friendly file: per record a 4-byte big-endian length
    // then the upload body encoding extended with the owner pid.
    void serialize(std::ostream& out) const;
    static StoreState deserialize(std::istream& in); // ParseError
    size_t serialized_size() const;

    // Exact per-record cost of the serialized layout.
    static size_t record_serialized_size(size_t ct_body_len, size_t token_count);

private:
    void insert(EncryptedRecord rec);

    std::map<Digest, EncryptedRecord> records_;
    std::map<Digest, std::set<Digest>> index_;
};

} // namespace cvcc::store
