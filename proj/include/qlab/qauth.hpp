#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "qlab/digest.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"

/// Quantum fingerprints of message digests compared by a SWAP test.
namespace qlab::qauth {

using qsim::StateVector;

inline constexpr std::size_t kMinQubits = 2;
inline constexpr std::size_t kMaxQubits = 10;
inline constexpr std::size_t kDefaultQubits = 6;
/// Largest fingerprint whose SWAP test runs as a full circuit (2m + 1 qubits).
inline constexpr std::size_t kCircuitQubits = 6;
inline constexpr double kDefaultThreshold = 0.9;
inline constexpr std::size_t kDefaultTrials = 64;

struct Fingerprint {
    std::size_t m_qubits = 0;
    Sha256Digest digest{};
    StateVector state{1};
};

/// Amplitude i is (-1)^{bit i} / sqrt(2^m), bits read MSB first from the
/// digest; past 256 bits the stream continues with SHA-256(digest || be32(k)).
/// Throws QubitCountOutOfRange.
Fingerprint fingerprint_create(std::span<const std::uint8_t> message, std::size_t m_qubits);
Fingerprint fingerprint_from_digest(const Sha256Digest &digest, std::size_t m_qubits);

/// Fraction of trials whose ancilla reads 0; per-trial probability is
/// 1/2 + |<a|b>|^2 / 2. Throws DimensionMismatch.
double swap_test(const StateVector &a, const StateVector &b, std::size_t trials, Rng &rng);
double swap_test(const Fingerprint &a, const Fingerprint &b, std::size_t trials, Rng &rng);

/// Exact ancilla-0 probability of the SWAP-test circuit.
double swap_accept_probability(const StateVector &a, const StateVector &b);

enum class Decision { Accept, Reject };

std::string to_string(Decision decision);

struct AuthResult {
    Decision decision = Decision::Reject;
    double accept_fraction = 0.0;
};

/// Throws InvalidThreshold unless 0.5 < threshold < 1.
AuthResult authenticate(std::span<const std::uint8_t> message, const Fingerprint &claimed,
                        double threshold, std::size_t trials, Rng &rng);

/// hex(m_qubits byte || digest)
std::string to_hex(const Fingerprint &fp);
/// Throws ParseError or QubitCountOutOfRange.
Fingerprint fingerprint_from_hex(std::string_view hex);

} // namespace qlab::qauth
