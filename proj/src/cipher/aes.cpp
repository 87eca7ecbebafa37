#include "qlab/cipher.hpp"

#include "qlab/error.hpp"

namespace qlab::cipher {

namespace {

constexpr std::uint8_t xtime(std::uint8_t x) {
    return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t p = 0;
    while (b) {
        if (b & 1)
            p ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return p;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int s) {
    return static_cast<std::uint8_t>((x << s) | (x >> (8 - s)));
}

// S-box from the GF(2^8) inverse followed by the affine map.
struct SboxTables {
    std::array<std::uint8_t, 256> fwd{};
    std::array<std::uint8_t, 256> inv{};
    constexpr SboxTables() {
        for (int x = 0; x < 256; ++x) {
            std::uint8_t inverse = 0;
            for (int y = 1; y < 256 && x != 0; ++y)
                if (gmul(std::uint8_t(x), std::uint8_t(y)) == 1) {
                    inverse = std::uint8_t(y);
                    break;
                }
            const std::uint8_t s = inverse ^ rotl8(inverse, 1) ^ rotl8(inverse, 2) ^
                                   rotl8(inverse, 3) ^ rotl8(inverse, 4) ^ 0x63;
            fwd[x] = s;
            inv[s] = std::uint8_t(x);
        }
    }
};

constexpr SboxTables kSbox{};

static_assert(kSbox.fwd[0x00] == 0x63 && kSbox.fwd[0x53] == 0xed);

using State = std::array<std::uint8_t, 16>; // column-major, as the block bytes

void add_round_key(State &s, const std::array<std::uint8_t, 16> &k) {
    for (int i = 0; i < 16; ++i)
        s[i] ^= k[i];
}

void sub_bytes(State &s) {
    for (auto &b : s)
        b = kSbox.fwd[b];
}

void inv_sub_bytes(State &s) {
    for (auto &b : s)
        b = kSbox.inv[b];
}

// Row r shifts left by r; byte (row r, column c) sits at index 4c + r.
void shift_rows(State &s) {
    State t = s;
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            s[4 * c + r] = t[4 * ((c + r) % 4) + r];
}

void inv_shift_rows(State &s) {
    State t = s;
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            s[4 * ((c + r) % 4) + r] = t[4 * c + r];
}

void mix_columns(State &s) {
    for (int c = 0; c < 4; ++c) {
        std::uint8_t *col = &s[4 * c];
        const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        col[0] = gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3;
        col[1] = a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3;
        col[2] = a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3);
        col[3] = gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2);
    }
}

void inv_mix_columns(State &s) {
    for (int c = 0; c < 4; ++c) {
        std::uint8_t *col = &s[4 * c];
        const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        col[0] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
        col[1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
        col[2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
        col[3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
    }
}

Block checked_block(std::span<const std::uint8_t> block) {
    if (block.size() != 16)
        throw Error(Errc::BadBlockSize,
                    "AES block must be 16 bytes, got " + std::to_string(block.size()));
    Block b;
    std::copy(block.begin(), block.end(), b.begin());
    return b;
}

} // namespace

Aes128::Aes128(const AesKey &key) {
    std::array<std::uint8_t, 176> w{};
    std::copy(key.begin(), key.end(), w.begin());
    std::uint8_t rcon = 0x01;
    for (int i = 16; i < 176; i += 4) {
        std::uint8_t t[4] = {w[i - 4], w[i - 3], w[i - 2], w[i - 1]};
        if (i % 16 == 0) {
            const std::uint8_t first = t[0];
            t[0] = kSbox.fwd[t[1]] ^ rcon;
            t[1] = kSbox.fwd[t[2]];
            t[2] = kSbox.fwd[t[3]];
            t[3] = kSbox.fwd[first];
            rcon = xtime(rcon);
        }
        for (int j = 0; j < 4; ++j)
            w[i + j] = w[i - 16 + j] ^ t[j];
    }
    for (int r = 0; r < 11; ++r)
        std::copy(w.begin() + 16 * r, w.begin() + 16 * (r + 1), round_keys_[r].begin());
}

Block Aes128::encrypt(const Block &block) const {
    State s = block;
    add_round_key(s, round_keys_[0]);
    for (int round = 1; round < 10; ++round) {
        sub_bytes(s);
        shift_rows(s);
        mix_columns(s);
        add_round_key(s, round_keys_[round]);
    }
    sub_bytes(s);
    shift_rows(s);
    add_round_key(s, round_keys_[10]);
    return s;
}

Block Aes128::decrypt(const Block &block) const {
    State s = block;
    add_round_key(s, round_keys_[10]);
    for (int round = 9; round > 0; --round) {
        inv_shift_rows(s);
        inv_sub_bytes(s);
        add_round_key(s, round_keys_[round]);
        inv_mix_columns(s);
    }
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, round_keys_[0]);
    return s;
}

Block aes128_encrypt_block(std::span<const std::uint8_t> block, const AesKey &key) {
    return Aes128(key).encrypt(checked_block(block));
}

Block aes128_decrypt_block(std::span<const std::uint8_t> block, const AesKey &key) {
    return Aes128(key).decrypt(checked_block(block));
}

} // namespace qlab::cipher
