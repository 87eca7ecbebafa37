#include "qlab/qauth.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "qlab/error.hpp"

namespace qlab::qauth {

namespace {

void check_qubits(std::size_t m) {
    if (m < kMinQubits || m > kMaxQubits)
        throw Error(Errc::QubitCountOutOfRange,
                    "fingerprint qubits must be in [2, 10], got " + std::to_string(m));
}

std::vector<std::uint8_t> sign_bits(const Sha256Digest &digest, std::size_t count) {
    std::vector<std::uint8_t> stream(digest.begin(), digest.end());
    for (std::uint32_t k = 1; stream.size() * 8 < count; ++k) {
        std::vector<std::uint8_t> block(digest.begin(), digest.end());
        for (int s = 24; s >= 0; s -= 8)
            block.push_back(static_cast<std::uint8_t>(k >> s));
        const auto more = sha256(block);
        stream.insert(stream.end(), more.begin(), more.end());
    }
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < count; ++i)
        bits[i] = (stream[i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

} // namespace

Fingerprint fingerprint_from_digest(const Sha256Digest &digest, std::size_t m_qubits) {
    check_qubits(m_qubits);
    const std::size_t dim = std::size_t{1} << m_qubits;
    const double mag = 1.0 / std::sqrt(static_cast<double>(dim));
    const auto bits = sign_bits(digest, dim);
    std::vector<qsim::Amplitude> amps(dim);
    for (std::size_t i = 0; i < dim; ++i)
        amps[i] = bits[i] ? -mag : mag;
    return {m_qubits, digest, StateVector::from_amplitudes(std::move(amps))};
}

Fingerprint fingerprint_create(std::span<const std::uint8_t> message, std::size_t m_qubits) {
    check_qubits(m_qubits);
    return fingerprint_from_digest(sha256(message), m_qubits);
}

double swap_accept_probability(const StateVector &a, const StateVector &b) {
    if (a.n_qubits() != b.n_qubits())
        throw Error(Errc::DimensionMismatch, "swap_test: fingerprints differ in qubit count");
    const std::size_t m = a.n_qubits();
    if (m > kCircuitQubits)
        return 0.5 + 0.5 * std::norm(qsim::inner_product(a, b));

    // Ancilla on qubit 0, a on 1..m, b on m+1..2m.
    auto state = qsim::tensor(qsim::StateVector(1), qsim::tensor(a, b));
    std::vector<qsim::Gate> circuit{qsim::Gate::h(0)};
    for (std::size_t i = 1; i <= m; ++i)
        circuit.push_back(qsim::Gate::cswap(0, i, m + i));
    circuit.push_back(qsim::Gate::h(0));
    state = qsim::apply_circuit(std::move(state), circuit);
    const std::size_t ancilla[] = {0};
    return qsim::outcome_probabilities(state, ancilla)[0];
}

double swap_test(const StateVector &a, const StateVector &b, std::size_t trials, Rng &rng) {
    if (trials < 1)
        throw Error(Errc::InvalidArgument, "swap_test: trials must be positive");
    const double p0 = swap_accept_probability(a, b);
    const double outcomes[] = {p0, 1.0 - p0};
    std::size_t accepted = 0;
    for (std::size_t t = 0; t < trials; ++t)
        accepted += qsim::sample_index(outcomes, rng) == 0;
    return static_cast<double>(accepted) / static_cast<double>(trials);
}

double swap_test(const Fingerprint &a, const Fingerprint &b, std::size_t trials, Rng &rng) {
    if (a.m_qubits != b.m_qubits)
        throw Error(Errc::DimensionMismatch, "swap_test: fingerprints differ in qubit count");
    return swap_test(a.state, b.state, trials, rng);
}

std::string to_string(Decision decision) {
    return decision == Decision::Accept ? "Accept" : "Reject";
}

AuthResult authenticate(std::span<const std::uint8_t> message, const Fingerprint &claimed,
                        double threshold, std::size_t trials, Rng &rng) {
    if (!(threshold > 0.5 && threshold < 1.0))
        throw Error(Errc::InvalidThreshold, "threshold must lie in (0.5, 1)");
    const auto fresh = fingerprint_create(message, claimed.m_qubits);
    AuthResult result;
    result.accept_fraction = swap_test(fresh, claimed, trials, rng);
    result.decision = result.accept_fraction >= threshold ? Decision::Accept : Decision::Reject;
    return result;
}

std::string to_hex(const Fingerprint &fp) {
    std::vector<std::uint8_t> bytes{static_cast<std::uint8_t>(fp.m_qubits)};
    bytes.insert(bytes.end(), fp.digest.begin(), fp.digest.end());
    return qlab::to_hex(bytes);
}

Fingerprint fingerprint_from_hex(std::string_view hex) {
    const auto bytes = from_hex(hex);
    if (bytes.size() != 33)
        throw Error(Errc::ParseError, "fingerprint must be 33 bytes");
    Sha256Digest digest;
    std::copy(bytes.begin() + 1, bytes.end(), digest.begin());
    return fingerprint_from_digest(digest, bytes[0]);
}

} // namespace qlab::qauth
