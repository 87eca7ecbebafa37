#include "qlab/bb84.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qlab/error.hpp"

namespace qlab::bb84 {

namespace {

// Independent RNG streams per protocol role.
enum Stream : std::uint64_t { kAlice = 1, kEve, kChannel, kBob, kSample };

const std::size_t kQubit0[] = {0};

Basis random_basis(Rng &rng) { return rng.bit() ? Basis::Diagonal : Basis::Rectilinear; }

void require_same_length(std::size_t a, std::size_t b, const char *what) {
    if (a != b)
        throw Error(Errc::LengthMismatch, std::string(what) + ": sequence lengths differ");
}

} // namespace

std::string to_string(Basis basis) { return basis == Basis::Rectilinear ? "+" : "x"; }

void validate(const Bb84Config &config) {
    auto fail = [](const std::string &msg) { throw Error(Errc::InvalidConfig, msg); };
    if (config.n_transmit < 1)
        fail("n_transmit must be positive");
    if (config.eve && !(config.eve->fraction >= 0.0 && config.eve->fraction <= 1.0))
        fail("eve fraction must lie in [0, 1]");
    if (!(config.noise_flip >= 0.0 && config.noise_flip <= 1.0))
        fail("noise_flip must lie in [0, 1]");
    if (config.sample_k < 1)
        fail("sample_k must be positive");
    if (!(config.qber_threshold > 0.0 && config.qber_threshold < 1.0))
        fail("qber_threshold must lie in (0, 1)");
}

StateVector encode(std::uint8_t bit, Basis basis) {
    auto state = StateVector::basis(1, bit & 1u);
    if (basis == Basis::Diagonal)
        state = qsim::apply_gate(std::move(state), qsim::Gate::h(0));
    return state;
}

Preparation alice_prepare(std::size_t n, Rng &rng) {
    if (n < 1)
        throw Error(Errc::InvalidArgument, "alice_prepare: n must be positive");
    Preparation prep;
    prep.bits.reserve(n);
    prep.bases.reserve(n);
    prep.qubits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        prep.bits.push_back(rng.bit());
        prep.bases.push_back(random_basis(rng));
        prep.qubits.push_back(encode(prep.bits.back(), prep.bases.back()));
    }
    return prep;
}

std::uint8_t measure_in_basis(const StateVector &qubit, Basis basis, Rng &rng) {
    if (qubit.n_qubits() != 1)
        throw Error(Errc::InvalidArgument, "expected a single-qubit state");
    StateVector rotated = qubit;
    if (basis == Basis::Diagonal)
        rotated = qsim::apply_gate(std::move(rotated), qsim::Gate::h(0));
    return static_cast<std::uint8_t>(qsim::measure(std::move(rotated), kQubit0, rng).outcome);
}

StateVector eve_intercept_resend(const StateVector &qubit, Basis eve_basis, Rng &rng) {
    return encode(measure_in_basis(qubit, eve_basis, rng), eve_basis);
}

StateVector eve_intercept_resend(const StateVector &qubit, Rng &rng) {
    const Basis basis = random_basis(rng);
    return eve_intercept_resend(qubit, basis, rng);
}

Bits bob_measure(std::span<const StateVector> qubits, std::span<const Basis> bases, Rng &rng) {
    require_same_length(qubits.size(), bases.size(), "bob_measure");
    Bits bits;
    bits.reserve(qubits.size());
    for (std::size_t i = 0; i < qubits.size(); ++i)
        bits.push_back(measure_in_basis(qubits[i], bases[i], rng));
    return bits;
}

SiftResult sift(std::span<const Basis> alice_bases, std::span<const Basis> bob_bases,
                std::span<const std::uint8_t> alice_bits, std::span<const std::uint8_t> bob_bits) {
    require_same_length(alice_bases.size(), bob_bases.size(), "sift");
    require_same_length(alice_bases.size(), alice_bits.size(), "sift");
    require_same_length(alice_bases.size(), bob_bits.size(), "sift");
    SiftResult out;
    for (std::size_t i = 0; i < alice_bases.size(); ++i) {
        if (alice_bases[i] != bob_bases[i])
            continue;
        out.indices.push_back(i);
        out.alice.push_back(alice_bits[i]);
        out.bob.push_back(bob_bits[i]);
    }
    return out;
}

QberEstimate estimate_qber(std::span<const std::uint8_t> sifted_alice,
                           std::span<const std::uint8_t> sifted_bob, std::size_t sample_k,
                           Rng &rng) {
    require_same_length(sifted_alice.size(), sifted_bob.size(), "estimate_qber");
    if (sample_k > sifted_alice.size())
        throw Error(Errc::SampleTooLarge, "sample_k " + std::to_string(sample_k) +
                                              " exceeds sifted length " +
                                              std::to_string(sifted_alice.size()));
    if (sample_k == 0)
        throw Error(Errc::InvalidArgument, "sample_k must be positive");

    std::vector<std::size_t> pool(sifted_alice.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < sample_k; ++i)
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(sample_k);
    std::sort(pool.begin(), pool.end());

    std::size_t errors = 0;
    for (std::size_t idx : pool)
        errors += sifted_alice[idx] != sifted_bob[idx];
    return {static_cast<double>(errors) / static_cast<double>(sample_k), std::move(pool)};
}

double security_parameter(double qber) { return std::max(0.0, 1.0 - 2.0 * qber); }

Bb84Session session_run(const Bb84Config &config) {
    validate(config);
    Rng alice_rng = Rng::derive(config.seed, kAlice);
    Rng eve_rng = Rng::derive(config.seed, kEve);
    Rng channel_rng = Rng::derive(config.seed, kChannel);
    Rng bob_rng = Rng::derive(config.seed, kBob);
    Rng sample_rng = Rng::derive(config.seed, kSample);

    Bb84Session s;
    auto prep = alice_prepare(config.n_transmit, alice_rng);
    s.alice_bits = std::move(prep.bits);
    s.alice_bases = std::move(prep.bases);

    if (config.eve) {
        for (auto &qubit : prep.qubits)
            if (eve_rng.bernoulli(config.eve->fraction))
                qubit = eve_intercept_resend(qubit, eve_rng);
    }

    s.bob_bases.reserve(config.n_transmit);
    for (std::size_t i = 0; i < config.n_transmit; ++i)
        s.bob_bases.push_back(random_basis(bob_rng));
    s.bob_bits = bob_measure(prep.qubits, s.bob_bases, bob_rng);
    if (config.noise_flip > 0.0)
        for (auto &bit : s.bob_bits)
            if (channel_rng.bernoulli(config.noise_flip))
                bit ^= 1u;

    auto sifted = sift(s.alice_bases, s.bob_bases, s.alice_bits, s.bob_bits);
    s.sift_indices = std::move(sifted.indices);
    s.sifted_alice = std::move(sifted.alice);
    s.sifted_bob = std::move(sifted.bob);
    const std::size_t n_sifted = s.sifted_alice.size();
    if (n_sifted < config.sample_k + 1)
        throw Error(Errc::InsufficientSiftedBits,
                    "sifted " + std::to_string(n_sifted) + " bits, need at least " +
                        std::to_string(config.sample_k + 1));

    auto estimate = estimate_qber(s.sifted_alice, s.sifted_bob, config.sample_k, sample_rng);
    s.disclosed_indices = std::move(estimate.disclosed);
    s.eve_detected = estimate.qber > config.qber_threshold;

    if (!s.eve_detected) {
        std::size_t next = 0;
        for (std::size_t i = 0; i < n_sifted; ++i) {
            if (next < s.disclosed_indices.size() && s.disclosed_indices[next] == i) {
                ++next;
                continue;
            }
            s.final_key.push_back(s.sifted_alice[i]);
            s.bob_final_key.push_back(s.sifted_bob[i]);
        }
    }

    std::size_t agree = 0;
    for (std::size_t i = 0; i < n_sifted; ++i)
        agree += s.sifted_alice[i] == s.sifted_bob[i];
    const double n = static_cast<double>(config.n_transmit);
    auto &m = s.metrics;
    m.key_agreement_rate = static_cast<double>(agree) / static_cast<double>(n_sifted);
    m.qber = estimate.qber;
    m.epsilon = security_parameter(estimate.qber);
    m.key_generation_rate = static_cast<double>(s.final_key.size()) / n;
    m.channel_capacity_utilization = static_cast<double>(n_sifted) / n;
    m.protocol_efficiency = 100.0 * static_cast<double>(s.final_key.size()) / n;
    return s;
}

std::string session_csv_header() {
    return "run_id,eve_present,key_agreement_pct,qber_pct,epsilon,key_gen_rate,"
           "channel_util_pct,efficiency_pct";
}

std::string to_csv_row(std::size_t run_id, bool eve_present, const SessionMetrics &m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%d,%.2f,%.2f,%.2f,%.4f,%.2f,%.2f", run_id,
                  eve_present ? 1 : 0, 100.0 * m.key_agreement_rate, 100.0 * m.qber, m.epsilon,
                  m.key_generation_rate, 100.0 * m.channel_capacity_utilization,
                  m.protocol_efficiency);
    return buf;
}

} // namespace qlab::bb84
