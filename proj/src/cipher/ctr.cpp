#include <algorithm>
#include <limits>

#include "qlab/cipher.hpp"
#include "qlab/digest.hpp"
#include "qlab/error.hpp"

namespace qlab::cipher {

namespace {

Block counter_block(const Nonce &nonce, std::uint32_t counter) {
    Block b{};
    std::copy(nonce.begin(), nonce.end(), b.begin());
    b[12] = static_cast<std::uint8_t>(counter >> 24);
    b[13] = static_cast<std::uint8_t>(counter >> 16);
    b[14] = static_cast<std::uint8_t>(counter >> 8);
    b[15] = static_cast<std::uint8_t>(counter);
    return b;
}

void xor_block(const Aes128 &aes, const Nonce &nonce, std::span<std::uint8_t> data,
               std::size_t block_index) {
    const Block ks = aes.encrypt(counter_block(nonce, static_cast<std::uint32_t>(block_index)));
    const std::size_t begin = 16 * block_index;
    const std::size_t end = std::min(begin + 16, data.size());
    for (std::size_t i = begin; i < end; ++i)
        data[i] ^= ks[i - begin];
}

std::size_t block_count(std::size_t bytes) { return (bytes + 15) / 16; }

constexpr std::size_t kParallelBlocks = 256;

} // namespace

namespace ctr_kernels {

void serial(const Aes128 &aes, const Nonce &nonce, std::span<std::uint8_t> data) {
    const std::size_t blocks = block_count(data.size());
    for (std::size_t b = 0; b < blocks; ++b)
        xor_block(aes, nonce, data, b);
}

void omp(const Aes128 &aes, const Nonce &nonce, std::span<std::uint8_t> data) {
    const auto blocks = static_cast<std::int64_t>(block_count(data.size()));
#pragma omp parallel for schedule(static) if (blocks >= std::int64_t(kParallelBlocks))
    for (std::int64_t b = 0; b < blocks; ++b)
        xor_block(aes, nonce, data, static_cast<std::size_t>(b));
}

} // namespace ctr_kernels

CipherMessage ctr_encrypt(std::span<const std::uint8_t> plaintext, const AesKey &key,
                          std::span<const std::uint8_t> nonce) {
    if (nonce.size() != 12)
        throw Error(Errc::NonceSizeInvalid,
                    "nonce must be 12 bytes, got " + std::to_string(nonce.size()));
    if (block_count(plaintext.size()) > std::numeric_limits<std::uint32_t>::max())
        throw Error(Errc::InvalidArgument, "plaintext exceeds 2^32 blocks");
    CipherMessage msg;
    std::copy(nonce.begin(), nonce.end(), msg.nonce.begin());
    msg.ciphertext.assign(plaintext.begin(), plaintext.end());
    ctr_kernels::omp(Aes128(key), msg.nonce, msg.ciphertext);
    return msg;
}

std::vector<std::uint8_t> ctr_decrypt(const CipherMessage &message, const AesKey &key) {
    std::vector<std::uint8_t> out = message.ciphertext;
    ctr_kernels::omp(Aes128(key), message.nonce, out);
    return out;
}

Nonce random_nonce(Rng &rng) {
    Nonce n;
    for (auto &b : n)
        b = static_cast<std::uint8_t>(rng.next() >> 56);
    return n;
}

AesKey derive_key(std::span<const std::uint8_t> bits) {
    if (bits.size() < kMinKeyBits)
        throw Error(Errc::InsufficientKeyMaterial,
                    "need at least 128 key bits, got " + std::to_string(bits.size()));
    std::vector<std::uint8_t> packed(8 + (bits.size() + 7) / 8, 0);
    const std::uint64_t count = bits.size();
    for (int i = 0; i < 8; ++i)
        packed[i] = static_cast<std::uint8_t>(count >> (56 - 8 * i));
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1u)
            packed[8 + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    const auto digest = sha256(packed);
    AesKey key;
    std::copy_n(digest.begin(), key.size(), key.begin());
    return key;
}

std::string to_hex(const CipherMessage &message) {
    std::vector<std::uint8_t> bytes(message.nonce.begin(), message.nonce.end());
    bytes.insert(bytes.end(), message.ciphertext.begin(), message.ciphertext.end());
    return qlab::to_hex(bytes);
}

CipherMessage message_from_hex(std::string_view hex) {
    const auto bytes = from_hex(hex);
    if (bytes.size() < 12)
        throw Error(Errc::ParseError, "cipher message shorter than its nonce");
    CipherMessage msg;
    std::copy_n(bytes.begin(), 12, msg.nonce.begin());
    msg.ciphertext.assign(bytes.begin() + 12, bytes.end());
    return msg;
}

} // namespace qlab::cipher
