#include <bit>

#include <openssl/evp.h>

#include "doctest.h"

#include "qlab/cipher.hpp"
#include "qlab/digest.hpp"
#include "qlab/error.hpp"

using namespace qlab;
using namespace qlab::cipher;

namespace {

Errc error_code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &err) {
        return err.code();
    }
    FAIL("expected qlab::Error");
    return Errc::InvalidArgument;
}

template <std::size_t N> std::array<std::uint8_t, N> hex_array(std::string_view hex) {
    const auto bytes = from_hex(hex);
    REQUIRE(bytes.size() == N);
    std::array<std::uint8_t, N> out;
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

// Oracle: OpenSSL's AES.
std::vector<std::uint8_t> openssl_run(const EVP_CIPHER *kind, const AesKey &key,
                                      const std::uint8_t *iv, std::span<const std::uint8_t> in,
                                      bool encrypt) {
    EVP_CIPHER_CTX *ctx = EVP_CIPHER_CTX_new();
    REQUIRE(ctx);
    REQUIRE(EVP_CipherInit_ex(ctx, kind, nullptr, key.data(), iv, encrypt ? 1 : 0) == 1);
    EVP_CIPHER_CTX_set_padding(ctx, 0);
    std::vector<std::uint8_t> out(in.size() + 16);
    int len = 0, tail = 0;
    REQUIRE(EVP_CipherUpdate(ctx, out.data(), &len, in.data(), int(in.size())) == 1);
    REQUIRE(EVP_CipherFinal_ex(ctx, out.data() + len, &tail) == 1);
    EVP_CIPHER_CTX_free(ctx);
    out.resize(std::size_t(len + tail));
    return out;
}

std::vector<std::uint8_t> openssl_ctr(const AesKey &key, const Nonce &nonce,
                                      std::span<const std::uint8_t> in) {
    std::uint8_t iv[16] = {};
    std::copy(nonce.begin(), nonce.end(), iv);
    return openssl_run(EVP_aes_128_ctr(), key, iv, in, true);
}

std::vector<std::uint8_t> random_bytes(std::size_t n, Rng &rng) {
    std::vector<std::uint8_t> v(n);
    for (auto &b : v)
        b = std::uint8_t(rng.next());
    return v;
}

AesKey random_key(Rng &rng) {
    AesKey k;
    for (auto &b : k)
        b = std::uint8_t(rng.next());
    return k;
}

} // namespace

TEST_CASE("known-answer vectors") {
    const auto key = hex_array<16>("000102030405060708090a0b0c0d0e0f");
    const auto pt = hex_array<16>("00112233445566778899aabbccddeeff");
    const auto ct = hex_array<16>("69c4e0d86a7b0430d8cdb78070b4c55a");
    CHECK(aes128_encrypt_block(pt, key) == ct);
    CHECK(aes128_decrypt_block(ct, key) == pt);

    const auto key_b = hex_array<16>("2b7e151628aed2a6abf7158809cf4f3c");
    const auto pt_b = hex_array<16>("3243f6a8885a308d313198a2e0370734");
    CHECK(to_hex(aes128_encrypt_block(pt_b, key_b)) == "3925841d02dc09fbdc118597196a0b32");

    const AesKey zero{};
    const Block zero_block{};
    CHECK(to_hex(aes128_encrypt_block(zero_block, zero)) == "66e94bd4ef8a2c3b884cfa59ca342b2e");
    CHECK(to_hex(aes128_decrypt_block(zero_block, zero)) == "140f0f1011b5223d79587717ffd9ec3a");
    CHECK(to_hex(aes128_decrypt_block(zero_block, zero)) ==
          to_hex(openssl_run(EVP_aes_128_ecb(), zero, nullptr, zero_block, false)));
}

TEST_CASE("block size validation") {
    const AesKey key{};
    const std::vector<std::uint8_t> short_block(15), long_block(17);
    CHECK(error_code_of([&] { aes128_encrypt_block(short_block, key); }) == Errc::BadBlockSize);
    CHECK(error_code_of([&] { aes128_decrypt_block(long_block, key); }) == Errc::BadBlockSize);
}

TEST_CASE("random blocks match the reference implementation and roundtrip") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto key = random_key(rng);
        const auto bytes = random_bytes(16, rng);
        Block block;
        std::copy(bytes.begin(), bytes.end(), block.begin());
        const Aes128 aes(key);
        const auto ct = aes.encrypt(block);
        REQUIRE(to_hex(ct) == to_hex(openssl_run(EVP_aes_128_ecb(), key, nullptr, block, true)));
        REQUIRE(aes.decrypt(ct) == block);
        REQUIRE(aes.encrypt(block) == ct);
    }
}

TEST_CASE("key avalanche") {
    Rng rng(23);
    std::vector<Block> blocks(1000);
    for (auto &b : blocks)
        for (auto &x : b)
            x = std::uint8_t(rng.next());
    const auto key = random_key(rng);
    const Aes128 base(key);
    std::vector<Block> base_ct;
    for (const auto &b : blocks)
        base_ct.push_back(base.encrypt(b));
    for (int bit = 0; bit < 128; bit += 9) {
        AesKey flipped = key;
        flipped[bit / 8] ^= std::uint8_t(0x80u >> (bit % 8));
        const Aes128 other(flipped);
        double changed = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const auto ct = other.encrypt(blocks[i]);
            for (int j = 0; j < 16; ++j)
                changed += std::popcount(unsigned(ct[j] ^ base_ct[i][j]));
        }
        const double mean = changed / double(blocks.size());
        CHECK(mean >= 50.0);
        CHECK(std::abs(mean - 64.0) <= 8.0);
    }
}

TEST_CASE("counter mode") {
    const auto key = hex_array<16>("000102030405060708090a0b0c0d0e0f");
    const auto nonce = hex_array<12>("a0a1a2a3a4a5a6a7a8a9aaab");
    const std::string fox = "The quick brown fox jumps over the lazy dog.";
    const std::vector<std::uint8_t> pt(fox.begin(), fox.end());
    const auto msg = ctr_encrypt(pt, key, nonce);
    CHECK(to_hex(msg.ciphertext) ==
          "53140463ba5772a03edf41a796f3cf4e9a81113d48b214c3d286b7d412225011c2e318d71ff34a2aee17d22e");
    CHECK(msg.ciphertext == openssl_ctr(key, nonce, pt));
    CHECK(ctr_decrypt(msg, key) == pt);

    CHECK(ctr_encrypt({}, key, nonce).ciphertext.empty());
    const std::vector<std::uint8_t> bad_nonce(8);
    CHECK(error_code_of([&] { ctr_encrypt(pt, key, bad_nonce); }) == Errc::NonceSizeInvalid);

    // Different nonces: the first keystream blocks are E(nonce1||0) and E(nonce2||0).
    auto other_nonce = nonce;
    other_nonce[0] ^= 1;
    const std::vector<std::uint8_t> zeros(16, 0);
    const auto ks1 = ctr_encrypt(zeros, key, nonce).ciphertext;
    const auto ks2 = ctr_encrypt(zeros, key, other_nonce).ciphertext;
    CHECK(ks1 != ks2);
    Block cb{};
    std::copy(other_nonce.begin(), other_nonce.end(), cb.begin());
    CHECK(to_hex(ks2) == to_hex(aes128_encrypt_block(cb, key)));
}

TEST_CASE("counter mode roundtrip on random messages") {
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const auto key = random_key(rng);
        const auto nonce = random_nonce(rng);
        const auto pt = random_bytes(rng.below(4096), rng);
        const auto msg = ctr_encrypt(pt, key, nonce);
        REQUIRE(msg.length() == pt.size());
        REQUIRE(ctr_decrypt(msg, key) == pt);
        if (i % 50 == 0)
            REQUIRE(msg.ciphertext == openssl_ctr(key, nonce, pt));
    }
    const auto key = random_key(rng);
    const auto nonce = random_nonce(rng);
    const auto big = random_bytes(1 << 20, rng);
    const auto msg = ctr_encrypt(big, key, nonce);
    CHECK(msg.ciphertext == openssl_ctr(key, nonce, big));
    CHECK(ctr_decrypt(msg, key) == big);
}

TEST_CASE("serial and parallel keystreams agree") {
    Rng rng(2);
    const Aes128 aes(random_key(rng));
    const auto nonce = random_nonce(rng);
    for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 4095u, 100000u}) {
        auto a = random_bytes(n, rng);
        auto b = a;
        ctr_kernels::serial(aes, nonce, a);
        ctr_kernels::omp(aes, nonce, b);
        CHECK(a == b);
    }
}

TEST_CASE("key derivation") {
    std::vector<std::uint8_t> bits(127, 1);
    CHECK(error_code_of([&] { derive_key(bits); }) == Errc::InsufficientKeyMaterial);

    std::vector<std::uint8_t> alternating(128);
    for (std::size_t i = 0; i < alternating.size(); ++i)
        alternating[i] = (i % 2 == 0) ? 1 : 0;
    CHECK(to_hex(derive_key(alternating)) == "aafe8c6137496c4fd70876c8a2e8dcdc");
    CHECK(derive_key(alternating) == derive_key(alternating));

    const std::vector<std::uint8_t> ones(200, 1);
    CHECK(to_hex(derive_key(ones)) == "99c42702450764f31c0f4c613cc4ef40");

    // 128 zeros hash as be64(128) || 16 zero bytes.
    std::vector<std::uint8_t> framed(24, 0);
    framed[7] = 128;
    const auto digest = sha256(framed);
    const std::vector<std::uint8_t> zeros(128, 0);
    const auto key = derive_key(zeros);
    CHECK(std::equal(key.begin(), key.end(), digest.begin()));
}

TEST_CASE("hex serialization") {
    Rng rng(8);
    CipherMessage msg{random_nonce(rng), random_bytes(33, rng)};
    const auto hex = to_hex(msg);
    CHECK(hex.size() == 2 * (12 + 33));
    const auto back = message_from_hex(hex);
    CHECK(back.nonce == msg.nonce);
    CHECK(back.ciphertext == msg.ciphertext);
    CHECK(error_code_of([] { message_from_hex("abcd"); }) == Errc::ParseError);
    CHECK(error_code_of([] { message_from_hex("zz"); }) == Errc::ParseError);
}
