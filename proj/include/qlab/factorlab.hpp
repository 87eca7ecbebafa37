#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlab/bigint.hpp"

/// RSA key generation and the classical factoring attacks used against it.
namespace qlab::factorlab {

using ::qlab::to_string;

using Seconds = std::chrono::duration<double>;

inline constexpr unsigned kDefaultPublicExponent = 65537;
inline constexpr int kMillerRabinRounds = 40;
/// Iterations between cooperative deadline checks.
inline constexpr std::uint64_t kTimeoutCheckInterval = std::uint64_t{1} << 16;

/// Miller-Rabin with `rounds` seeded random bases.
bool is_probable_prime(const BigInt &n, int rounds = kMillerRabinRounds);

/// Square-and-multiply. Uses a native 64-bit path whenever `mod` fits.
BigInt mod_pow(const BigInt &base, const BigInt &exponent, const BigInt &mod);

/// Inverse of `value` modulo `mod` by extended Euclid, if it exists.
std::optional<BigInt> mod_inverse(const BigInt &value, const BigInt &mod);

struct RsaKeyPair {
    BigInt p;
    BigInt q;
    BigInt n;
    BigInt phi;
    BigInt e;
    BigInt d;
};

/// Throws NonPrimeInput, EqualPrimes or ExponentNotCoprime.
RsaKeyPair rsa_keygen(const BigInt &p, const BigInt &q,
                      const BigInt &e = kDefaultPublicExponent);

/// m^e mod n; requires 0 <= m < n (MessageOutOfRange).
BigInt rsa_encrypt(const BigInt &m, const RsaKeyPair &key);

/// c^d mod n; requires 0 <= c < n (CiphertextOutOfRange).
BigInt rsa_decrypt(const BigInt &c, const RsaKeyPair &key);

enum class Method { TrialDivision, PollardRho };
enum class FactorStatus { Success, Timeout, NoFactor };

std::string to_string(Method method);
std::string to_string(FactorStatus status);

struct FactorReport {
    BigInt n;
    Method method = Method::TrialDivision;
    std::optional<BigInt> factor;
    double elapsed = 0.0; // seconds, wall clock
    FactorStatus status = FactorStatus::NoFactor;
    std::uint64_t iterations = 0;
};

/// Scans i = 2 .. floor(sqrt(n)) + 1 and returns the smallest divisor.
FactorReport trial_division(const BigInt &n, Seconds timeout);

struct PollardOptions {
    /// Accumulate |x - y| products and take one gcd per batch.
    bool batched_gcd = false;
    unsigned batch_size = 128;
};

/// Floyd-cycle Pollard rho with f(x) = x^2 + c mod n. Restarts with fresh
/// (x, c) when the gcd collapses to n. Even n returns 2 immediately.
FactorReport pollard_rho(const BigInt &n, Seconds timeout, std::uint64_t seed,
                         PollardOptions options = {});

/// One report per (target, method), in target-major order. Each attempt
/// draws its randomness from its own stream derived from `seed`.
std::vector<FactorReport> factor_benchmark(std::span<const BigInt> targets,
                                           std::span<const Method> methods,
                                           Seconds timeout, std::uint64_t seed);

/// Random prime with exactly `bits` bits.
BigInt random_prime(std::size_t bits, Rng &rng);

/// p*q with p, q random primes of bits/2 and bits - bits/2 bits, such that the
/// product has exactly `bits` bits.
BigInt balanced_semiprime(std::size_t bits, Rng &rng);

std::string factor_csv_header();
std::string to_csv_row(const FactorReport &report);

} // namespace qlab::factorlab
