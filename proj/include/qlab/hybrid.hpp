#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/bb84.hpp"
#include "qlab/cipher.hpp"
#include "qlab/immune.hpp"
#include "qlab/qauth.hpp"
#include "qlab/rng.hpp"

/// Key exchange, encryption, authentication and monitoring in one pipeline.
namespace qlab::hybrid {

enum class Verdict { Delivered, AbortedQkd, AuthRejected, ImmuneAlarm };

std::string to_string(Verdict verdict);

struct HybridRecord {
    bb84::Bb84Session session; // the last session attempted
    bool eve_present = false;
    std::optional<cipher::CipherMessage> cipher;
    std::optional<qauth::Fingerprint> fingerprint; // over the ciphertext
    Verdict verdict = Verdict::AbortedQkd;
    std::size_t retries = 0;
};

struct SendOptions {
    std::size_t fingerprint_qubits = qauth::kDefaultQubits;
    immune::Monitor *monitor = nullptr; // woken by an aborted session
};

immune::FeatureVector session_features(const bb84::Bb84Session &session,
                                       double auth_accept_fraction);

/// Runs fresh sessions (seeded from `rng`) until one passes the QBER check with
/// at least 128 final key bits, then encrypts and fingerprints. Gives up with
/// AbortedQkd after max_retries + 1 sessions.
HybridRecord secure_send(std::span<const std::uint8_t> plaintext, const bb84::Bb84Config &config,
                         std::size_t max_retries, Rng &rng, const SendOptions &options = {});

struct ReceiveResult {
    Verdict verdict = Verdict::AuthRejected;
    std::optional<std::vector<std::uint8_t>> plaintext;
    double accept_fraction = 0.0;
};

/// Throws NotDelivered for a record that was never delivered and KeyMismatch
/// when Bob's final key differs from Alice's.
ReceiveResult secure_receive(const HybridRecord &record, const bb84::Bb84Session &shared_session,
                             double threshold, std::size_t trials, Rng &rng,
                             immune::Monitor *monitor = nullptr);

/// Parsed form of the text envelope.
struct Envelope {
    Verdict verdict = Verdict::AbortedQkd;
    std::size_t retries = 0;
    std::string metrics_row; // bb84 session CSV row
    std::optional<cipher::CipherMessage> cipher;
    std::optional<qauth::Fingerprint> fingerprint;
};

std::string to_envelope(const HybridRecord &record);
/// Throws ParseError.
Envelope parse_envelope(std::string_view text);

} // namespace qlab::hybrid
