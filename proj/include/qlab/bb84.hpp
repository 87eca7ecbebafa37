#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"

/// BB84 key distribution over a simulated single-qubit channel.
namespace qlab::bb84 {

using qsim::StateVector;
using Bits = std::vector<std::uint8_t>;

enum class Basis : std::uint8_t { Rectilinear, Diagonal };

std::string to_string(Basis basis);

/// Eve measures each qubit with probability `fraction` and resends it.
struct InterceptResend {
    double fraction = 1.0;
};

struct Bb84Config {
    std::size_t n_transmit = 128;
    std::optional<InterceptResend> eve;
    double noise_flip = 0.0; // chance Bob's measured bit is flipped
    std::size_t sample_k = 8;
    double qber_threshold = 0.11;
    std::uint64_t seed = 0;
};

/// Throws InvalidConfig.
void validate(const Bb84Config &config);

struct SessionMetrics {
    double key_agreement_rate = 0.0;
    double qber = 0.0;
    double epsilon = 0.0;
    double key_generation_rate = 0.0;
    double channel_capacity_utilization = 0.0;
    double protocol_efficiency = 0.0; // percent
};

struct Bb84Session {
    Bits alice_bits;
    std::vector<Basis> alice_bases;
    std::vector<Basis> bob_bases;
    Bits bob_bits;
    std::vector<std::size_t> sift_indices;
    Bits sifted_alice;
    Bits sifted_bob;
    std::vector<std::size_t> disclosed_indices; // positions within the sifted sequence
    Bits final_key;                             // Alice's copy
    Bits bob_final_key;
    SessionMetrics metrics;
    bool eve_detected = false;
};

struct Preparation {
    Bits bits;
    std::vector<Basis> bases;
    std::vector<StateVector> qubits;
};

/// Rectilinear b -> |b>, Diagonal b -> H|b>.
StateVector encode(std::uint8_t bit, Basis basis);

Preparation alice_prepare(std::size_t n, Rng &rng);

/// Measures in `basis` (Diagonal applies H first) and returns the bit.
std::uint8_t measure_in_basis(const StateVector &qubit, Basis basis, Rng &rng);

StateVector eve_intercept_resend(const StateVector &qubit, Rng &rng);
StateVector eve_intercept_resend(const StateVector &qubit, Basis eve_basis, Rng &rng);

/// Throws LengthMismatch.
Bits bob_measure(std::span<const StateVector> qubits, std::span<const Basis> bases, Rng &rng);

struct SiftResult {
    std::vector<std::size_t> indices;
    Bits alice;
    Bits bob;
};

/// Throws LengthMismatch.
SiftResult sift(std::span<const Basis> alice_bases, std::span<const Basis> bob_bases,
                std::span<const std::uint8_t> alice_bits, std::span<const std::uint8_t> bob_bits);

struct QberEstimate {
    double qber = 0.0;
    std::vector<std::size_t> disclosed; // ascending
};

/// Throws SampleTooLarge when sample_k exceeds the sifted length.
QberEstimate estimate_qber(std::span<const std::uint8_t> sifted_alice,
                           std::span<const std::uint8_t> sifted_bob, std::size_t sample_k,
                           Rng &rng);

/// max(0, 1 - 2 qber)
double security_parameter(double qber);

/// Throws InvalidConfig or InsufficientSiftedBits.
Bb84Session session_run(const Bb84Config &config);

std::string session_csv_header();
std::string to_csv_row(std::size_t run_id, bool eve_present, const SessionMetrics &metrics);

} // namespace qlab::bb84
