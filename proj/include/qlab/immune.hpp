#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlab/rng.hpp"

/// Negative-selection anomaly detection over per-session metrics.
namespace qlab::immune {

inline constexpr std::size_t kDims = 4;
inline constexpr double kToleranceFloor = 0.05;
inline constexpr double kMinRadius = 0.02;
inline constexpr std::size_t kMaxAttempts = 10000;
inline constexpr std::size_t kMemoryCap = 256;
inline constexpr std::size_t kMinTrainingSamples = 10;
inline constexpr double kMinScale = 0.5;
inline constexpr double kMaxScale = 2.0;

using Point = std::array<double, kDims>;

struct FeatureVector {
    double qber = 0.0;
    double sifting_rate = 0.0;
    double auth_accept_fraction = 1.0;
    double session_abort = 0.0; // 0 or 1

    Point point() const { return {qber, sifting_rate, auth_accept_fraction, session_abort}; }
    static FeatureVector from_point(const Point &p) { return {p[0], p[1], p[2], p[3]}; }
};

double distance(const Point &a, const Point &b);

/// Axis-aligned box mean +/- max(3 sigma, floor), clamped to [0, 1].
struct SelfModel {
    Point mean{};
    Point tolerance{};
    Point lo{};
    Point hi{};

    bool contains(const Point &p) const;
    double distance_to(const Point &p) const; // 0 inside
    double volume() const;
};

/// Throws TooFewSamples below 10 samples, InvalidArgument outside [0, 1].
SelfModel train_self(std::span<const FeatureVector> benign);

struct Detector {
    Point center{};
    double radius = 0.0;

    bool operator==(const Detector &) const = default;
};

/// Throws CoverageUnreachable when the box covers >= 99% of the unit cube.
std::vector<Detector> generate_detectors(const SelfModel &self, std::size_t count, Rng &rng);

struct MemoryEntry {
    Detector detector;
    std::size_t hit_count = 0;
    std::uint64_t sequence = 0; // insertion order, breaks eviction ties
};

struct ImmuneState {
    std::vector<Detector> detectors;
    std::vector<MemoryEntry> memory;
    double threshold_scale = 1.0;
    std::uint64_t rng_seed = 0;
    std::uint64_t next_sequence = 0;
};

enum class AssessmentKind { Benign, Anomalous, MemoryHit };

std::string to_string(AssessmentKind kind);

struct Assessment {
    AssessmentKind kind = AssessmentKind::Benign;
    double score = 0.0; // radius * scale - distance
    std::optional<Detector> matched;
};

/// Memory detectors first; among matches the highest score wins.
Assessment detect(const FeatureVector &features, const ImmuneState &state);

/// Promotes `matched` into memory or bumps its hit count. The least-hit entry
/// (oldest on ties) is evicted past 256 entries.
ImmuneState memorize(ImmuneState state, const Detector &matched);

enum class Outcome { TruePositive, FalsePositive };

/// x1.05 or x0.95, clamped to [0.5, 2].
ImmuneState reinforce(ImmuneState state, Outcome outcome);

/// Versioned text dump; restore throws ParseError.
void checkpoint(std::ostream &out, const ImmuneState &state);
ImmuneState restore(std::istream &in);

/// Single-owner wrapper: dormant until activated, then checks every session
/// and remembers what it flags.
class Monitor {
  public:
    explicit Monitor(ImmuneState state) : state_(std::move(state)) {}

    bool active() const { return active_; }
    void activate() { active_ = true; }

    /// Benign while dormant.
    Assessment observe(const FeatureVector &features);
    void feedback(Outcome outcome) { state_ = reinforce(std::move(state_), outcome); }

    const ImmuneState &state() const { return state_; }

  private:
    ImmuneState state_;
    bool active_ = false;
};

} // namespace qlab::immune
