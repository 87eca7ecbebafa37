#include "qlab/immune.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "qlab/error.hpp"

namespace qlab::immune {

double distance(const Point &a, const Point &b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < kDims; ++d)
        acc += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(acc);
}

bool SelfModel::contains(const Point &p) const {
    for (std::size_t d = 0; d < kDims; ++d)
        if (p[d] < lo[d] || p[d] > hi[d])
            return false;
    return true;
}

double SelfModel::distance_to(const Point &p) const {
    double acc = 0.0;
    for (std::size_t d = 0; d < kDims; ++d) {
        const double gap = std::max({lo[d] - p[d], 0.0, p[d] - hi[d]});
        acc += gap * gap;
    }
    return std::sqrt(acc);
}

double SelfModel::volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < kDims; ++d)
        v *= hi[d] - lo[d];
    return v;
}

SelfModel train_self(std::span<const FeatureVector> benign) {
    if (benign.size() < kMinTrainingSamples)
        throw Error(Errc::TooFewSamples, "need at least 10 benign samples, got " +
                                             std::to_string(benign.size()));
    SelfModel model;
    const double n = static_cast<double>(benign.size());
    for (const auto &f : benign) {
        const auto p = f.point();
        for (std::size_t d = 0; d < kDims; ++d) {
            if (!(p[d] >= 0.0 && p[d] <= 1.0))
                throw Error(Errc::InvalidArgument, "feature components must lie in [0, 1]");
            model.mean[d] += p[d];
        }
    }
    for (auto &m : model.mean)
        m /= n;
    for (std::size_t d = 0; d < kDims; ++d) {
        double var = 0.0;
        for (const auto &f : benign) {
            const double dev = f.point()[d] - model.mean[d];
            var += dev * dev;
        }
        const double sd = std::sqrt(var / (n - 1.0));
        model.tolerance[d] = std::max(3.0 * sd, kToleranceFloor);
        model.lo[d] = std::clamp(model.mean[d] - model.tolerance[d], 0.0, 1.0);
        model.hi[d] = std::clamp(model.mean[d] + model.tolerance[d], 0.0, 1.0);
    }
    return model;
}

std::vector<Detector> generate_detectors(const SelfModel &self, std::size_t count, Rng &rng) {
    if (self.volume() >= 0.99)
        throw Error(Errc::CoverageUnreachable, "self region covers the feature space");
    std::vector<Detector> out;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && out.size() < count; ++attempt) {
        Point c;
        for (auto &x : c)
            x = rng.uniform();
        if (self.contains(c))
            continue;
        out.push_back({c, std::max(self.distance_to(c), kMinRadius)});
    }
    return out;
}

std::string to_string(AssessmentKind kind) {
    switch (kind) {
    case AssessmentKind::Benign:
        return "Benign";
    case AssessmentKind::Anomalous:
        return "Anomalous";
    case AssessmentKind::MemoryHit:
        return "MemoryHit";
    }
    return "?";
}

namespace {

template <typename Range, typename Get>
std::optional<std::pair<Detector, double>> best_match(const Point &p, const Range &range,
                                                      double scale, Get get) {
    std::optional<std::pair<Detector, double>> best;
    for (const auto &item : range) {
        const Detector &det = get(item);
        const double reach = det.radius * scale;
        const double dist = distance(p, det.center);
        if (dist <= reach && (!best || reach - dist > best->second))
            best = std::make_pair(det, reach - dist);
    }
    return best;
}

} // namespace

Assessment detect(const FeatureVector &features, const ImmuneState &state) {
    const auto p = features.point();
    if (auto hit = best_match(p, state.memory, state.threshold_scale,
                              [](const MemoryEntry &e) -> const Detector & { return e.detector; }))
        return {AssessmentKind::MemoryHit, hit->second, hit->first};
    if (auto hit = best_match(p, state.detectors, state.threshold_scale,
                              [](const Detector &d) -> const Detector & { return d; }))
        return {AssessmentKind::Anomalous, hit->second, hit->first};
    return {};
}

ImmuneState memorize(ImmuneState state, const Detector &matched) {
    for (auto &entry : state.memory)
        if (entry.detector == matched) {
            ++entry.hit_count;
            return state;
        }
    if (state.memory.size() >= kMemoryCap) {
        auto victim = std::min_element(
            state.memory.begin(), state.memory.end(), [](const auto &a, const auto &b) {
                return a.hit_count != b.hit_count ? a.hit_count < b.hit_count
                                                  : a.sequence < b.sequence;
            });
        state.memory.erase(victim);
    }
    state.memory.push_back({matched, 1, state.next_sequence++});
    return state;
}

ImmuneState reinforce(ImmuneState state, Outcome outcome) {
    const double factor = outcome == Outcome::TruePositive ? 1.05 : 0.95;
    state.threshold_scale = std::clamp(state.threshold_scale * factor, kMinScale, kMaxScale);
    return state;
}

namespace {

constexpr const char *kMagic = "qlab-immune";
constexpr int kVersion = 1;

void write_detector(std::ostream &out, const Detector &d) {
    for (double x : d.center)
        out << x << ' ';
    out << d.radius;
}

Detector read_detector(std::istream &in) {
    Detector d;
    for (auto &x : d.center)
        in >> x;
    in >> d.radius;
    return d;
}

void expect(std::istream &in, const std::string &word) {
    std::string got;
    if (!(in >> got) || got != word)
        throw Error(Errc::ParseError, "immune checkpoint: expected '" + word + "'");
}

} // namespace

void checkpoint(std::ostream &out, const ImmuneState &state) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << kMagic << " v" << kVersion << '\n';
    out << "seed " << state.rng_seed << '\n';
    out << "scale " << state.threshold_scale << '\n';
    out << "sequence " << state.next_sequence << '\n';
    out << "detectors " << state.detectors.size() << '\n';
    for (const auto &d : state.detectors) {
        write_detector(out, d);
        out << '\n';
    }
    out << "memory " << state.memory.size() << '\n';
    for (const auto &e : state.memory) {
        write_detector(out, e.detector);
        out << ' ' << e.hit_count << ' ' << e.sequence << '\n';
    }
    out << "end\n";
    out.precision(old_precision);
}

ImmuneState restore(std::istream &in) {
    expect(in, kMagic);
    expect(in, "v" + std::to_string(kVersion));
    ImmuneState s;
    std::size_t n = 0;
    expect(in, "seed");
    in >> s.rng_seed;
    expect(in, "scale");
    in >> s.threshold_scale;
    expect(in, "sequence");
    in >> s.next_sequence;
    expect(in, "detectors");
    in >> n;
    if (!in || n > 1'000'000)
        throw Error(Errc::ParseError, "immune checkpoint: bad detector count");
    for (std::size_t i = 0; i < n; ++i)
        s.detectors.push_back(read_detector(in));
    expect(in, "memory");
    in >> n;
    if (!in || n > kMemoryCap)
        throw Error(Errc::ParseError, "immune checkpoint: bad memory count");
    for (std::size_t i = 0; i < n; ++i) {
        MemoryEntry e;
        e.detector = read_detector(in);
        in >> e.hit_count >> e.sequence;
        s.memory.push_back(e);
    }
    expect(in, "end");
    if (!(s.threshold_scale >= kMinScale && s.threshold_scale <= kMaxScale))
        throw Error(Errc::ParseError, "immune checkpoint: threshold scale out of range");
    return s;
}

Assessment Monitor::observe(const FeatureVector &features) {
    if (!active_)
        return {};
    auto result = detect(features, state_);
    if (result.kind != AssessmentKind::Benign && result.matched)
        state_ = memorize(std::move(state_), *result.matched);
    return result;
}

} // namespace qlab::immune
