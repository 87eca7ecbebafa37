#include "qlab/error.hpp"
#include "qlab/factorlab.hpp"

#include "modular.hpp"

namespace qlab::factorlab {

using detail::u64;

namespace {

constexpr std::uint64_t kPrimalitySeed = 0x5eed'0f'4a11'0f'0001ULL;

template <class UInt> bool miller_rabin(const UInt &n, int rounds, Rng &rng) {
    static constexpr unsigned kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2)
        return false;
    for (unsigned p : kSmall) {
        if (n == p)
            return true;
        if (n % p == 0)
            return false;
    }
    UInt d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (int round = 0; round < rounds; ++round) {
        UInt a;
        if constexpr (std::is_same_v<UInt, u64>)
            a = rng.between(2, n - 2);
        else
            a = random_between(BigInt(2), n - 2, rng);
        UInt x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

} // namespace

bool is_probable_prime(const BigInt &n, int rounds) {
    Rng rng(kPrimalitySeed);
    if (auto small = to_u64(n))
        return miller_rabin<u64>(*small, rounds, rng);
    return miller_rabin<BigInt>(n, rounds, rng);
}

BigInt mod_pow(const BigInt &base, const BigInt &exponent, const BigInt &mod) {
    if (mod <= 0)
        throw Error(Errc::InvalidArgument, "modulus must be positive");
    if (exponent < 0)
        throw Error(Errc::InvalidArgument, "negative exponent");
    auto m = to_u64(mod);
    auto e = to_u64(exponent);
    if (m && e)
        return BigInt(detail::powmod<u64>(static_cast<u64>(base % mod), *e, *m));
    return detail::powmod<BigInt>(base % mod, exponent, mod);
}

std::optional<BigInt> mod_inverse(const BigInt &value, const BigInt &mod) {
    // Iterative extended Euclid on (value mod m, m).
    BigInt old_r = value % mod, r = mod;
    BigInt old_s = 1, s = 0;
    if (old_r < 0)
        old_r += mod;
    while (r != 0) {
        const BigInt quotient = old_r / r;
        BigInt tmp = old_r - quotient * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quotient * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1)
        return std::nullopt;
    BigInt inv = old_s % mod;
    if (inv < 0)
        inv += mod;
    return inv;
}

RsaKeyPair rsa_keygen(const BigInt &p, const BigInt &q, const BigInt &e) {
    if (!is_probable_prime(p))
        throw Error(Errc::NonPrimeInput, "p = " + to_string(p) + " is not prime");
    if (!is_probable_prime(q))
        throw Error(Errc::NonPrimeInput, "q = " + to_string(q) + " is not prime");
    if (p == q)
        throw Error(Errc::EqualPrimes, "p and q must differ");
    if (e <= 1)
        throw Error(Errc::InvalidArgument, "public exponent must exceed 1");

    RsaKeyPair key;
    key.p = p;
    key.q = q;
    key.n = p * q;
    key.phi = (p - 1) * (q - 1);
    key.e = e;
    auto d = mod_inverse(e, key.phi);
    if (!d)
        throw Error(Errc::ExponentNotCoprime, "gcd(e, phi) > 1");
    key.d = *d;
    return key;
}

BigInt rsa_encrypt(const BigInt &m, const RsaKeyPair &key) {
    if (m < 0 || m >= key.n)
        throw Error(Errc::MessageOutOfRange, "message must satisfy 0 <= m < n");
    return mod_pow(m, key.e, key.n);
}

BigInt rsa_decrypt(const BigInt &c, const RsaKeyPair &key) {
    if (c < 0 || c >= key.n)
        throw Error(Errc::CiphertextOutOfRange, "ciphertext must satisfy 0 <= c < n");
    return mod_pow(c, key.d, key.n);
}

BigInt random_prime(std::size_t bits, Rng &rng) {
    if (bits < 2)
        throw Error(Errc::InvalidArgument, "a prime needs at least 2 bits");
    if (bits == 2)
        return rng.bit() ? 3 : 2;
    const BigInt top = BigInt(1) << (bits - 1);
    const BigInt second = BigInt(1) << (bits - 2);
    for (;;) {
        BigInt candidate = random_between(top, (top << 1) - 1, rng);
        candidate |= second;
        candidate |= 1;
        if (is_probable_prime(candidate))
            return candidate;
    }
}

BigInt balanced_semiprime(std::size_t bits, Rng &rng) {
    if (bits < 6)
        throw Error(Errc::InvalidArgument, "semiprime needs at least 6 bits");
    const std::size_t low = bits / 2;
    for (;;) {
        // Top two bits set on both factors keeps the product at full width.
        BigInt p = random_prime(low, rng);
        BigInt q = random_prime(bits - low, rng);
        if (p != q && bit_length(p * q) == bits)
            return p * q;
    }
}

} // namespace qlab::factorlab
