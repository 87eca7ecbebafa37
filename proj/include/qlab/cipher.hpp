#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/rng.hpp"

/// AES-128, counter mode, and key derivation from QKD key bits.
namespace qlab::cipher {

using Block = std::array<std::uint8_t, 16>;
using AesKey = std::array<std::uint8_t, 16>;
using Nonce = std::array<std::uint8_t, 12>;

inline constexpr std::size_t kMinKeyBits = 128;

/// Expanded AES-128 key schedule.
class Aes128 {
  public:
    explicit Aes128(const AesKey &key);

    Block encrypt(const Block &block) const;
    Block decrypt(const Block &block) const;

  private:
    std::array<std::array<std::uint8_t, 16>, 11> round_keys_;
};

/// Throw BadBlockSize unless `block` is 16 bytes.
Block aes128_encrypt_block(std::span<const std::uint8_t> block, const AesKey &key);
Block aes128_decrypt_block(std::span<const std::uint8_t> block, const AesKey &key);

struct CipherMessage {
    Nonce nonce{};
    std::vector<std::uint8_t> ciphertext;

    std::size_t length() const { return ciphertext.size(); }
};

/// Keystream block i is E(key, nonce || be32(i)); both kernels XOR it into
/// `data` in place and agree byte for byte.
namespace ctr_kernels {
void serial(const Aes128 &aes, const Nonce &nonce, std::span<std::uint8_t> data);
void omp(const Aes128 &aes, const Nonce &nonce, std::span<std::uint8_t> data);
} // namespace ctr_kernels

/// Throws NonceSizeInvalid unless the nonce is 12 bytes.
CipherMessage ctr_encrypt(std::span<const std::uint8_t> plaintext, const AesKey &key,
                          std::span<const std::uint8_t> nonce);
std::vector<std::uint8_t> ctr_decrypt(const CipherMessage &message, const AesKey &key);

Nonce random_nonce(Rng &rng);

/// First 16 bytes of SHA-256(be64(bit count) || bits packed MSB first).
/// Throws InsufficientKeyMaterial below 128 bits.
AesKey derive_key(std::span<const std::uint8_t> bits);

/// hex(nonce || ciphertext)
std::string to_hex(const CipherMessage &message);
/// Throws ParseError.
CipherMessage message_from_hex(std::string_view hex);

} // namespace qlab::cipher
