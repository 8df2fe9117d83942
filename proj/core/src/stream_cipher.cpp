#include "cvcc/stream_cipher.hpp"

#include "cvcc/opcount.hpp"
#include "cvcc/sha256.hpp"

namespace cvcc::crypto {

namespace {

Bytes keystream_xor(const Digest& key, const Nonce32& nonce, ByteView data) {
    Bytes out(data.size());
    size_t blocks = (data.size() + 31) / 32;
    metrics::note_op(metrics::OpKind::Hash, blocks);
    for (size_t b = 0; b < blocks; ++b) {
        Digest block = sha256(canon({to_bytes("ks"), ByteView(key), ByteView(nonce), be64(b)}));
        size_t off = b * 32;
        size_t len = std::min<size_t>(32, data.size() - off);
        for (size_t i = 0; i < len; ++i) out[off + i] = data[off + i] ^ block[i];
    }
    return out;
}

Digest body_tag(const Digest& key, const Nonce32& nonce, ByteView body) {
    metrics::note_op(metrics::OpKind::Hash);
    return sha256(canon({to_bytes("tag"), ByteView(key), ByteView(nonce), body}));
}

} // namespace

CipherText stream_encrypt(const Digest& key, const Nonce32& nonce, ByteView plaintext) {
    CipherText ct;
    ct.nonce = nonce;
    ct.body = keystream_xor(key, nonce, plaintext);
    ct.tag = body_tag(key, nonce, ct.body);
    return ct;
}

Bytes stream_decrypt(const Digest& key, const CipherText& ct) {
    if (body_tag(key, ct.nonce, ct.body) != ct.tag)
        raise(Errc::TagMismatch, "ciphertext authentication failed");
    return keystream_xor(key, ct.nonce, ct.body);
}

} // namespace cvcc::crypto
