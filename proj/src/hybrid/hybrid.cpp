#include "qlab/hybrid.hpp"

#include <sstream>

#include "qlab/error.hpp"

namespace qlab::hybrid {

std::string to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Delivered:
        return "Delivered";
    case Verdict::AbortedQkd:
        return "AbortedQkd";
    case Verdict::AuthRejected:
        return "AuthRejected";
    case Verdict::ImmuneAlarm:
        return "ImmuneAlarm";
    }
    return "?";
}

namespace {

std::optional<Verdict> verdict_from_string(std::string_view s) {
    for (Verdict v : {Verdict::Delivered, Verdict::AbortedQkd, Verdict::AuthRejected,
                      Verdict::ImmuneAlarm})
        if (s == to_string(v))
            return v;
    return std::nullopt;
}

bool flagged(const immune::Assessment &a) { return a.kind != immune::AssessmentKind::Benign; }

} // namespace

immune::FeatureVector session_features(const bb84::Bb84Session &session,
                                       double auth_accept_fraction) {
    return {session.metrics.qber, session.metrics.channel_capacity_utilization,
            auth_accept_fraction, session.eve_detected ? 1.0 : 0.0};
}

HybridRecord secure_send(std::span<const std::uint8_t> plaintext, const bb84::Bb84Config &config,
                         std::size_t max_retries, Rng &rng, const SendOptions &options) {
    if (plaintext.empty())
        throw Error(Errc::InvalidArgument, "secure_send: plaintext is empty");
    bb84::validate(config);

    HybridRecord record;
    record.eve_present = config.eve && config.eve->fraction > 0.0;
    for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
        record.retries = attempt;
        bb84::Bb84Config cfg = config;
        cfg.seed = rng.next();
        try {
            record.session = bb84::session_run(cfg);
        } catch (const Error &err) {
            if (err.code() != Errc::InsufficientSiftedBits)
                throw;
            record.session = {};
            continue;
        }
        const auto &s = record.session;
        if (options.monitor) {
            if (s.eve_detected)
                options.monitor->activate();
            if (flagged(options.monitor->observe(session_features(s, 1.0))) && !s.eve_detected) {
                record.verdict = Verdict::ImmuneAlarm;
                return record;
            }
        }
        if (s.eve_detected || s.final_key.size() < cipher::kMinKeyBits)
            continue;

        const auto key = cipher::derive_key(s.final_key);
        const auto nonce = cipher::random_nonce(rng);
        record.cipher = cipher::ctr_encrypt(plaintext, key, nonce);
        record.fingerprint =
            qauth::fingerprint_create(record.cipher->ciphertext, options.fingerprint_qubits);
        record.verdict = Verdict::Delivered;
        return record;
    }
    record.verdict = Verdict::AbortedQkd;
    return record;
}

ReceiveResult secure_receive(const HybridRecord &record, const bb84::Bb84Session &shared_session,
                             double threshold, std::size_t trials, Rng &rng,
                             immune::Monitor *monitor) {
    if (record.verdict != Verdict::Delivered || !record.cipher || !record.fingerprint)
        throw Error(Errc::NotDelivered, "record verdict is " + to_string(record.verdict));
    const auto bob_key = cipher::derive_key(shared_session.bob_final_key);
    if (bob_key != cipher::derive_key(record.session.final_key))
        throw Error(Errc::KeyMismatch, "receiver key differs from sender key");

    const auto auth =
        qauth::authenticate(record.cipher->ciphertext, *record.fingerprint, threshold, trials, rng);
    ReceiveResult result;
    result.accept_fraction = auth.accept_fraction;
    const auto features = session_features(shared_session, auth.accept_fraction);
    if (auth.decision == qauth::Decision::Reject) {
        if (monitor) {
            monitor->activate();
            monitor->observe(features);
        }
        result.verdict = Verdict::AuthRejected;
        return result;
    }
    if (monitor && flagged(monitor->observe(features))) {
        result.verdict = Verdict::ImmuneAlarm;
        return result;
    }
    result.plaintext = cipher::ctr_decrypt(*record.cipher, bob_key);
    result.verdict = Verdict::Delivered;
    return result;
}

std::string to_envelope(const HybridRecord &record) {
    std::ostringstream out;
    out << "qlab-hybrid v1\n";
    out << "verdict " << to_string(record.verdict) << '\n';
    out << "retries " << record.retries << '\n';
    out << "metrics " << bb84::to_csv_row(0, record.eve_present, record.session.metrics) << '\n';
    out << "cipher " << (record.cipher ? cipher::to_hex(*record.cipher) : "-") << '\n';
    out << "fingerprint " << (record.fingerprint ? qauth::to_hex(*record.fingerprint) : "-")
        << '\n';
    return out.str();
}

Envelope parse_envelope(std::string_view text) {
    std::istringstream in{std::string(text)};
    auto field = [&](const std::string &name) {
        std::string key, value;
        if (!(in >> key >> value) || key != name)
            throw Error(Errc::ParseError, "hybrid envelope: expected field '" + name + "'");
        return value;
    };
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "qlab-hybrid" || version != "v1")
        throw Error(Errc::ParseError, "hybrid envelope: bad header");
    Envelope env;
    const auto verdict = verdict_from_string(field("verdict"));
    if (!verdict)
        throw Error(Errc::ParseError, "hybrid envelope: unknown verdict");
    env.verdict = *verdict;
    const auto retries = field("retries");
    try {
        std::size_t used = 0;
        env.retries = std::stoull(retries, &used);
        if (used != retries.size())
            throw std::invalid_argument(retries);
    } catch (const std::logic_error &) {
        throw Error(Errc::ParseError, "hybrid envelope: bad retries '" + retries + "'");
    }
    env.metrics_row = field("metrics");
    if (auto c = field("cipher"); c != "-")
        env.cipher = cipher::message_from_hex(c);
    if (auto f = field("fingerprint"); f != "-")
        env.fingerprint = qauth::fingerprint_from_hex(f);
    return env;
}

} // namespace qlab::hybrid
