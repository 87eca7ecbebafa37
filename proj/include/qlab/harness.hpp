#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlab/bb84.hpp"

/// Experiment runners behind the command-line tool. Every runner returns a
/// table whose rows are ordered by run id regardless of worker scheduling.
namespace qlab::harness {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

enum class Format { Csv, Json };

Format parse_format(const std::string &name); // throws InvalidArgument

void write_csv(std::ostream &out, const Table &table);
/// Array of objects keyed by column name; values are the CSV strings.
void write_json(std::ostream &out, const Table &table);
void write_table(std::ostream &out, const Table &table, Format format);

enum class PrimeCategory { Small, Medium, Large, VeryLarge };

std::string to_string(PrimeCategory category);
PrimeCategory parse_category(const std::string &name); // throws InvalidArgument
std::vector<PrimeCategory> all_categories();

/// Five fixed prime pairs per category.
std::span<const std::pair<std::uint64_t, std::uint64_t>> benchmark_primes(PrimeCategory category);

inline constexpr unsigned kBenchMessage = 42;

/// category,p,q,n_bits,keygen_s,encrypt_s,decrypt_s. Throws if any pair
/// fails the M = 42 roundtrip.
Table run_rsa_bench(std::span<const PrimeCategory> categories);

/// The seven reference moduli.
std::span<const std::uint64_t> reference_moduli();
inline constexpr std::size_t kFactorTableBits[] = {20, 40, 60, 70, 80};

/// n,method,factor,elapsed_s,status over the reference moduli plus one balanced
/// semiprime per size in kFactorTableBits, both methods each.
Table run_factor_table(std::chrono::duration<double> timeout, std::uint64_t seed);

inline constexpr std::uint64_t kShorModuli[] = {15, 21, 33, 35};
inline constexpr std::size_t kShorAttempts = 32;

/// n,a,r,factor1,factor2,attempts,status; `runs` seeded runs per modulus.
Table run_shor(std::span<const std::uint64_t> moduli, std::size_t runs, std::uint64_t seed);

/// Session rows for `runs` clean sessions then `eve_runs` intercepted ones,
/// followed by the mean rows avg_no_eve and avg_eve. Throws InvalidArgument
/// when runs is 0.
Table run_bb84_suite(std::size_t runs, std::size_t eve_runs, const bb84::Bb84Config &base,
                     double eve_fraction);

struct DetectionConfig {
    std::size_t trials = 10000;
    std::size_t sample_k = 8;
    double eve_fraction = 1.0;
    double noise_flip = 0.005; // false-positive leg
    double qber_threshold = 0.11;
    std::uint64_t seed = 0;
};

/// metric,measured,expected,reported: detection rate, false-positive rate and
/// mean QBER under attack, each beside its analytic value and a reference
/// figure. Throws InvalidArgument below 100 trials.
Table run_detection_experiment(const DetectionConfig &config);

/// P(X / k > threshold) for X ~ Binomial(k, p): the chance a session with
/// per-bit error rate p is flagged.
double flag_probability(double p, std::size_t k, double threshold);

/// session,eve_present,qber,assessment,score,threshold_scale over a mixed
/// stream; the layer trains on clean sessions and learns from ground truth.
Table run_immune_sim(std::size_t sessions, double eve_fraction, std::uint64_t seed);

/// run_id,eve_present,verdict,retries,plaintext_bytes,qber_pct,final_key_bits,
/// accept_fraction,roundtrip_ok. Every second run has Eve when eve_fraction > 0.
/// A delivered record whose keys disagree reports verdict KeyMismatch.
Table run_pipeline(std::size_t runs, double eve_fraction, std::size_t sample_k,
                   std::uint64_t seed);

struct ReproduceConfig {
    std::uint64_t seed = 42;
    std::chrono::duration<double> timeout{100.0};
    std::size_t runs = 10;
    double eve_fraction = 1.0;
    std::size_t sample_k = 8;
    std::size_t detection_trials = 10000;
    std::size_t immune_sessions = 500;
    Format format = Format::Csv;
};

/// Runs every experiment into `dir` and writes manifest.json beside them.
/// Returns the written file names.
std::vector<std::string> reproduce(const std::filesystem::path &dir,
                                   const ReproduceConfig &config);

std::string version();

} // namespace qlab::harness
