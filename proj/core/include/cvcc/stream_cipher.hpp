#pragma once

#include "cvcc/bytes.hpp"

namespace cvcc::crypto {

// Hash-based stream cipher with an authentication tag, built from the same
// primitive set as the rest of the stack. Keystream block i is
// H(canon("ks", key, nonce, be64(i))); the tag binds key, nonce and body
// and is checked before any plaintext is released.
struct CipherText {
    Nonce32 nonce{};
    Bytes body;
    Digest tag{};

    bool operator==(const CipherText&) const = default;
};

CipherText stream_encrypt(const Digest& key, const Nonce32& nonce, ByteView plaintext);

// TagMismatch on any corruption of nonce, body or tag.
Bytes stream_decrypt(const Digest& key, const CipherText& ct);

} // namespace cvcc::crypto
