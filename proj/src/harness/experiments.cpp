#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qlab/error.hpp"
#include "qlab/factorlab.hpp"
#include "qlab/harness.hpp"
#include "qlab/hybrid.hpp"
#include "qlab/immune.hpp"
#include "qlab/shor.hpp"

namespace qlab::harness {

namespace {

using Clock = std::chrono::steady_clock;
using Pair = std::pair<std::uint64_t, std::uint64_t>;

constexpr Pair kSmall[] = {{11, 13}, {17, 19}, {23, 29}, {31, 37}, {53, 61}};
constexpr Pair kMedium[] = {{503, 509}, {521, 523}, {541, 547}, {557, 563}, {809, 811}};
constexpr Pair kLarge[] = {
    {50021, 50023}, {70001, 70009}, {80021, 80039}, {90001, 90007}, {50033, 50047}};
constexpr Pair kVeryLarge[] = {
    {500009, 500029}, {700001, 700027}, {900001, 900007}, {999983, 1000003}, {500041, 500057}};

constexpr std::uint64_t kReferenceModuli[] = {
    143, 1147, 656099, 2502200483, 4900700009, 6404800819, 250019000261};

// Work items run on OpenMP threads; the first exception is rethrown.
template <typename Fn> void parallel_for(std::size_t n, Fn fn) {
    std::exception_ptr failure;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(qlab_harness_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string seconds(double s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", s);
    return buf;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

template <typename Fn> double timed(Fn fn, int reps) {
    const auto start = Clock::now();
    for (int i = 0; i < reps; ++i)
        fn();
    return std::chrono::duration<double>(Clock::now() - start).count() / reps;
}

} // namespace

std::string version() { return "0.1.0"; }

std::string to_string(PrimeCategory category) {
    switch (category) {
    case PrimeCategory::Small:
        return "small";
    case PrimeCategory::Medium:
        return "medium";
    case PrimeCategory::Large:
        return "large";
    case PrimeCategory::VeryLarge:
        return "very_large";
    }
    return "?";
}

PrimeCategory parse_category(const std::string &name) {
    for (auto c : all_categories())
        if (name == to_string(c))
            return c;
    throw Error(Errc::InvalidArgument, "unknown prime category '" + name + "'");
}

std::vector<PrimeCategory> all_categories() {
    return {PrimeCategory::Small, PrimeCategory::Medium, PrimeCategory::Large,
            PrimeCategory::VeryLarge};
}

std::span<const Pair> benchmark_primes(PrimeCategory category) {
    switch (category) {
    case PrimeCategory::Small:
        return kSmall;
    case PrimeCategory::Medium:
        return kMedium;
    case PrimeCategory::Large:
        return kLarge;
    case PrimeCategory::VeryLarge:
        return kVeryLarge;
    }
    return {};
}

Table run_rsa_bench(std::span<const PrimeCategory> categories) {
    using namespace factorlab;
    Table t{{"category", "p", "q", "n_bits", "keygen_s", "encrypt_s", "decrypt_s"}, {}};
    constexpr int kReps = 200;
    const BigInt m = kBenchMessage;
    for (auto category : categories) {
        for (const auto &[p, q] : benchmark_primes(category)) {
            RsaKeyPair key;
            const double keygen = timed([&] { key = rsa_keygen(p, q); }, kReps);
            BigInt c, back;
            const double enc = timed([&] { c = rsa_encrypt(m, key); }, kReps);
            const double dec = timed([&] { back = rsa_decrypt(c, key); }, kReps);
            if (back != m)
                throw Error(Errc::InvalidArgument, "RSA roundtrip failed for p=" +
                                                       std::to_string(p) +
                                                       " q=" + std::to_string(q));
            t.rows.push_back({to_string(category), std::to_string(p), std::to_string(q),
                              std::to_string(bit_length(key.n)), seconds(keygen), seconds(enc),
                              seconds(dec)});
        }
    }
    return t;
}

std::span<const std::uint64_t> reference_moduli() { return kReferenceModuli; }

Table run_factor_table(std::chrono::duration<double> timeout, std::uint64_t seed) {
    using namespace factorlab;
    if (!(timeout.count() > 0))
        throw Error(Errc::InvalidArgument, "timeout must be positive");
    std::vector<BigInt> targets(kReferenceModuli, std::end(kReferenceModuli));
    Rng rng = Rng::derive(seed, 0xfac7);
    for (std::size_t bits : kFactorTableBits)
        targets.push_back(balanced_semiprime(bits, rng));
    const Method methods[] = {Method::TrialDivision, Method::PollardRho};
    Table t{split_csv(factor_csv_header()), {}};
    for (const auto &report : factor_benchmark(targets, methods, timeout, seed))
        t.rows.push_back(split_csv(to_csv_row(report)));
    return t;
}

Table run_shor(std::span<const std::uint64_t> moduli, std::size_t runs, std::uint64_t seed) {
    Table t{split_csv(shor::shor_csv_header()), {}};
    t.rows.resize(moduli.size() * runs);
    parallel_for(t.rows.size(), [&](std::size_t i) {
        const std::uint64_t n = moduli[i / runs];
        const std::uint64_t run_seed = Rng::derive(seed, n * 1'000'003 + i % runs).next();
        t.rows[i] = split_csv(shor::to_csv_row(shor::shor_factor(n, run_seed, kShorAttempts)));
    });
    return t;
}

Table run_bb84_suite(std::size_t runs, std::size_t eve_runs, const bb84::Bb84Config &base,
                     double eve_fraction) {
    if (runs < 1)
        throw Error(Errc::InvalidArgument, "runs must be at least 1");
    const std::size_t total = runs + eve_runs;
    std::vector<bb84::SessionMetrics> metrics(total);
    parallel_for(total, [&](std::size_t i) {
        bb84::Bb84Config cfg = base;
        cfg.seed = Rng::derive(base.seed, i).next();
        cfg.eve.reset();
        if (i >= runs)
            cfg.eve = bb84::InterceptResend{eve_fraction};
        metrics[i] = bb84::session_run(cfg).metrics;
    });

    Table t{split_csv(bb84::session_csv_header()), {}};
    for (std::size_t i = 0; i < total; ++i)
        t.rows.push_back(split_csv(bb84::to_csv_row(i + 1, i >= runs, metrics[i])));

    auto mean_row = [&](const std::string &label, std::size_t from, std::size_t to) {
        bb84::SessionMetrics m{};
        const double n = static_cast<double>(to - from);
        for (std::size_t i = from; i < to; ++i) {
            m.key_agreement_rate += metrics[i].key_agreement_rate / n;
            m.qber += metrics[i].qber / n;
            m.epsilon += metrics[i].epsilon / n;
            m.key_generation_rate += metrics[i].key_generation_rate / n;
            m.channel_capacity_utilization += metrics[i].channel_capacity_utilization / n;
            m.protocol_efficiency += metrics[i].protocol_efficiency / n;
        }
        auto row = split_csv(bb84::to_csv_row(0, from >= runs, m));
        row[0] = label;
        t.rows.push_back(std::move(row));
    };
    mean_row("avg_no_eve", 0, runs);
    if (eve_runs > 0)
        mean_row("avg_eve", runs, total);
    return t;
}

double flag_probability(double p, std::size_t k, double threshold) {
    double total = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        if (!(static_cast<double>(j) / static_cast<double>(k) > threshold))
            continue;
        const double log_choose = std::lgamma(double(k) + 1) - std::lgamma(double(j) + 1) -
                                  std::lgamma(double(k - j) + 1);
        const double term = std::exp(log_choose + (j ? double(j) * std::log(p) : 0.0) +
                                     (k - j ? double(k - j) * std::log1p(-p) : 0.0));
        total += term;
    }
    return std::clamp(total, 0.0, 1.0);
}

Table run_detection_experiment(const DetectionConfig &config) {
    if (config.trials < 100)
        throw Error(Errc::InvalidArgument, "detection experiment needs at least 100 trials");
    const std::size_t n_transmit = std::max<std::size_t>(256, 8 * config.sample_k);
    std::vector<std::uint8_t> eve_flag(config.trials), clean_flag(config.trials);
    std::vector<double> eve_qber(config.trials);
    parallel_for(config.trials, [&](std::size_t i) {
        bb84::Bb84Config cfg;
        cfg.n_transmit = n_transmit;
        cfg.sample_k = config.sample_k;
        cfg.qber_threshold = config.qber_threshold;
        cfg.seed = Rng::derive(config.seed, 2 * i).next();
        cfg.eve = bb84::InterceptResend{config.eve_fraction};
        const auto attacked = bb84::session_run(cfg);
        eve_flag[i] = attacked.eve_detected;
        eve_qber[i] = attacked.metrics.qber;

        cfg.seed = Rng::derive(config.seed, 2 * i + 1).next();
        cfg.eve.reset();
        cfg.noise_flip = config.noise_flip;
        clean_flag[i] = bb84::session_run(cfg).eve_detected;
    });
    const double n = static_cast<double>(config.trials);
    const double detection = double(std::count(eve_flag.begin(), eve_flag.end(), 1)) / n;
    const double false_pos = double(std::count(clean_flag.begin(), clean_flag.end(), 1)) / n;
    double mean_qber = 0.0;
    for (double q : eve_qber)
        mean_qber += q / n;

    const double per_bit = config.eve_fraction / 4.0;
    Table t{{"metric", "measured", "expected", "reported"}, {}};
    t.rows.push_back(
        {"detection_rate_pct", fixed(100 * detection, 2),
         fixed(100 * flag_probability(per_bit, config.sample_k, config.qber_threshold), 2),
         "89.8"});
    t.rows.push_back({"false_positive_rate_pct", fixed(100 * false_pos, 2),
                      fixed(100 * flag_probability(config.noise_flip, config.sample_k,
                                                   config.qber_threshold),
                            2),
                      "2.3-5.8"});
    t.rows.push_back(
        {"mean_qber_under_attack_pct", fixed(100 * mean_qber, 2), fixed(100 * per_bit, 2), "24.7"});
    return t;
}

Table run_immune_sim(std::size_t sessions, double eve_fraction, std::uint64_t seed) {
    constexpr std::size_t kTraining = 100;
    constexpr std::size_t kDetectors = 200;
    auto features = [&](std::uint64_t s, bool eve) {
        bb84::Bb84Config cfg;
        cfg.n_transmit = 512;
        cfg.sample_k = 32;
        cfg.noise_flip = 0.01;
        cfg.seed = s;
        if (eve)
            cfg.eve = bb84::InterceptResend{eve_fraction};
        return hybrid::session_features(bb84::session_run(cfg), 1.0);
    };

    std::vector<immune::FeatureVector> benign(kTraining);
    parallel_for(kTraining, [&](std::size_t i) {
        benign[i] = features(Rng::derive(seed, i).next(), false);
    });
    immune::ImmuneState state;
    state.rng_seed = seed;
    Rng det_rng = Rng::derive(seed, 0xde7);
    state.detectors = immune::generate_detectors(immune::train_self(benign), kDetectors, det_rng);

    // Sessions are generated in parallel; the single-owner state then learns in order.
    Rng mix = Rng::derive(seed, 0x5e55);
    std::vector<std::uint8_t> eve(sessions);
    for (auto &e : eve)
        e = eve_fraction > 0.0 && mix.bernoulli(0.2);
    std::vector<immune::FeatureVector> stream(sessions);
    parallel_for(sessions, [&](std::size_t i) {
        stream[i] = features(Rng::derive(seed, kTraining + i).next(), eve[i]);
    });

    Table t{{"session", "eve_present", "qber", "assessment", "score", "threshold_scale"}, {}};
    for (std::size_t i = 0; i < sessions; ++i) {
        const auto a = immune::detect(stream[i], state);
        if (a.kind != immune::AssessmentKind::Benign) {
            if (eve[i]) {
                state = immune::reinforce(std::move(state), immune::Outcome::TruePositive);
                state = immune::memorize(std::move(state), *a.matched);
            } else {
                state = immune::reinforce(std::move(state), immune::Outcome::FalsePositive);
            }
        }
        t.rows.push_back({std::to_string(i + 1), eve[i] ? "1" : "0", fixed(stream[i].qber, 4),
                          immune::to_string(a.kind), fixed(a.score, 6),
                          fixed(state.threshold_scale, 6)});
    }
    return t;
}

Table run_pipeline(std::size_t runs, double eve_fraction, std::size_t sample_k,
                   std::uint64_t seed) {
    Table t{{"run_id", "eve_present", "verdict", "retries", "plaintext_bytes", "qber_pct",
             "final_key_bits", "accept_fraction", "roundtrip_ok"},
            {}};
    t.rows.resize(runs);
    parallel_for(runs, [&](std::size_t i) {
        Rng rng = Rng::derive(seed, i);
        std::vector<std::uint8_t> msg(1 + rng.below(4096));
        for (auto &b : msg)
            b = static_cast<std::uint8_t>(rng.next());
        bb84::Bb84Config cfg;
        cfg.n_transmit = 1024;
        cfg.sample_k = sample_k;
        const bool eve = eve_fraction > 0.0 && i % 2 == 1;
        if (eve)
            cfg.eve = bb84::InterceptResend{eve_fraction};
        const auto rec = hybrid::secure_send(msg, cfg, 2, rng);
        std::string accept = "", ok = "0";
        std::string verdict = hybrid::to_string(rec.verdict);
        if (rec.verdict == hybrid::Verdict::Delivered) {
            try {
                const auto got = hybrid::secure_receive(rec, rec.session, qauth::kDefaultThreshold,
                                                        qauth::kDefaultTrials, rng);
                verdict = hybrid::to_string(got.verdict);
                accept = fixed(got.accept_fraction, 4);
                ok = got.plaintext == msg ? "1" : "0";
            } catch (const Error &err) {
                if (err.code() != Errc::KeyMismatch)
                    throw;
                verdict = to_string(err.code()); // undetected channel errors
            }
        }
        t.rows[i] = {std::to_string(i + 1),
                     eve ? "1" : "0",
                     verdict,
                     std::to_string(rec.retries),
                     std::to_string(msg.size()),
                     fixed(100 * rec.session.metrics.qber, 2),
                     std::to_string(rec.session.final_key.size()),
                     accept,
                     ok};
    });
    return t;
}

std::vector<std::string> reproduce(const std::filesystem::path &dir,
                                   const ReproduceConfig &config) {
    std::filesystem::create_directories(dir);
    const std::string ext = config.format == Format::Csv ? ".csv" : ".json";
    std::vector<std::string> files;
    auto emit = [&](const std::string &name, const Table &table) {
        const auto file = name + ext;
        std::ofstream out(dir / file);
        if (!out)
            throw Error(Errc::InvalidArgument, "cannot write " + (dir / file).string());
        write_table(out, table, config.format);
        files.push_back(file);
    };

    emit("rsa_bench", run_rsa_bench(all_categories()));
    emit("factor_table", run_factor_table(config.timeout, config.seed));
    emit("shor", run_shor(kShorModuli, config.runs, config.seed));
    bb84::Bb84Config base;
    base.seed = config.seed;
    base.sample_k = config.sample_k;
    emit("bb84_suite", run_bb84_suite(config.runs, config.runs, base, config.eve_fraction));
    DetectionConfig det;
    det.sample_k = config.sample_k;
    det.eve_fraction = config.eve_fraction;
    det.seed = config.seed;
    det.trials = config.detection_trials;
    emit("detection", run_detection_experiment(det));
    emit("immune_sim", run_immune_sim(config.immune_sessions, config.eve_fraction, config.seed));
    emit("pipeline", run_pipeline(config.runs, config.eve_fraction, config.sample_k, config.seed));

    nlohmann::ordered_json manifest;
    manifest["tool_version"] = version();
    manifest["compiler"] = __VERSION__;
    manifest["seed"] = config.seed;
    manifest["timeout_s"] = config.timeout.count();
    manifest["runs"] = config.runs;
    manifest["eve_fraction"] = config.eve_fraction;
    manifest["sample_k"] = config.sample_k;
    manifest["format"] = config.format == Format::Csv ? "csv" : "json";
    manifest["configs"] = {
        {"bb84", {{"n_transmit", base.n_transmit}, {"qber_threshold", base.qber_threshold}}},
        {"detection",
         {{"trials", det.trials}, {"noise_flip", det.noise_flip}, {"qber_threshold", det.qber_threshold}}},
        {"immune_sim", {{"sessions", config.immune_sessions}, {"detectors", 200}, {"training_sessions", 100}}},
        {"shor", {{"moduli", kShorModuli}, {"max_attempts", kShorAttempts}}},
        {"factor_table", {{"semiprime_bits", kFactorTableBits}}}};
    manifest["files"] = files;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    files.push_back("manifest.json");
    return files;
}

} // namespace qlab::harness
