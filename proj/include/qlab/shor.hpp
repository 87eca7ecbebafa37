#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlab/rng.hpp"

/// Shor's factoring algorithm with simulated quantum period finding.
namespace qlab::shor {

/// Largest modulus whose period-finding registers are simulated.
inline constexpr std::uint64_t kMaxModulus = 35;

enum class ShorStatus { Factored, LuckyGcd, Exhausted };

std::string to_string(ShorStatus status);

struct ShorOutcome {
    std::uint64_t n = 0;
    std::uint64_t a = 0; // base of the final attempt
    std::optional<std::uint64_t> r;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> factors; // ascending
    std::size_t attempts = 0;
    ShorStatus status = ShorStatus::Exhausted;
};

/// Source register of ceil(2 log2 n) qubits, target of ceil(log2 n).
struct RegisterLayout {
    std::size_t source;
    std::size_t target;
    std::size_t total() const { return source + target; }
};

RegisterLayout register_layout(std::uint64_t n);

/// How the source-register state is simulated.
///
/// JointRegister keeps source and target in one statevector and applies the
/// modular exponentiation as controlled permutations of the target register.
/// DeferredTarget measures the target first (legal because it is never touched
/// again) and simulates only the collapsed source register; it gives the same
/// source distribution and fits registers that exceed the statevector cap.
enum class PeriodRoute { Auto, JointRegister, DeferredTarget };

/// Smallest convergent denominator r of y/q with 1 < r < n and
/// |y/q - h/r| <= 1/(2q). Empty for y = 0 or when no convergent qualifies.
std::optional<std::uint64_t> continued_fraction_period(std::uint64_t y, std::uint64_t q,
                                                       std::uint64_t n);

struct PeriodSample {
    std::uint64_t measured = 0;
    std::uint64_t q = 0; // 2^source
    std::optional<std::uint64_t> r;
    PeriodRoute route = PeriodRoute::Auto;
};

PeriodSample sample_period(std::uint64_t a, std::uint64_t n, Rng &rng,
                           PeriodRoute route = PeriodRoute::Auto);

/// Candidate period of a mod n; the caller verifies a^r = 1 (mod n).
/// Throws NotCoprime when gcd(a, n) > 1.
std::optional<std::uint64_t> quantum_period_find(std::uint64_t a, std::uint64_t n, Rng &rng);
std::optional<std::uint64_t> quantum_period_find(std::uint64_t a, std::uint64_t n,
                                                 std::uint64_t seed);

/// Exact probability of each source-register outcome just before measurement.
std::vector<double> source_distribution(std::uint64_t a, std::uint64_t n,
                                        PeriodRoute route = PeriodRoute::Auto);

/// Throws EvenInput, PrimeInput, PrimePowerInput or TooLargeForSimulation.
/// `forced_base` pins a for every attempt.
ShorOutcome shor_factor(std::uint64_t n, std::uint64_t seed, std::size_t max_attempts,
                        std::optional<std::uint64_t> forced_base = std::nullopt);

std::string shor_csv_header();
std::string to_csv_row(const ShorOutcome &outcome);

} // namespace qlab::shor
