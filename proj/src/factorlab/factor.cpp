#include <sstream>

#include "qlab/error.hpp"
#include "qlab/factorlab.hpp"

#include "modular.hpp"

namespace qlab::factorlab {

using detail::u64;

namespace {

using Clock = std::chrono::steady_clock;

// Cooperative deadline. Also stops one chunk early when the previous chunk's
// duration says the next one would overrun the budget.
class Deadline {
  public:
    explicit Deadline(Seconds budget)
        : budget_(budget.count()), start_(Clock::now()), last_check_(start_) {}

    bool expired() {
        const auto now = Clock::now();
        const double chunk = Seconds(now - last_check_).count();
        last_check_ = now;
        return elapsed(now) + chunk > budget_;
    }

    double elapsed() const { return elapsed(Clock::now()); }

  private:
    double elapsed(Clock::time_point now) const { return Seconds(now - start_).count(); }

    double budget_;
    Clock::time_point start_;
    Clock::time_point last_check_;
};

template <class UInt>
FactorStatus trial_scan(const UInt &n, u64 limit, Deadline &deadline, FactorReport &report) {
    u64 i = 2;
    for (;;) {
        const u64 chunk_end = i + kTimeoutCheckInterval;
        for (; i < chunk_end; ++i) {
            if (i > limit) {
                report.iterations = i - 2;
                return FactorStatus::NoFactor;
            }
            if (n % i == 0) {
                report.factor = BigInt(i);
                report.iterations = i - 1;
                return FactorStatus::Success;
            }
        }
        if (deadline.expired()) {
            report.iterations = i - 2;
            return FactorStatus::Timeout;
        }
    }
}

template <class UInt> UInt random_in(const UInt &lo, const UInt &hi, Rng &rng) {
    if constexpr (std::is_same_v<UInt, u64>)
        return rng.between(lo, hi);
    else
        return random_between(lo, hi, rng);
}

template <class UInt> UInt step(const UInt &x, const UInt &c, const UInt &n) {
    return detail::addmod(detail::mulmod(x, x, n), c, n);
}

template <class UInt>
FactorStatus rho_literal(const UInt &n, Rng &rng, Deadline &deadline, FactorReport &report) {
    for (;;) {
        UInt x = random_in<UInt>(2, n - 1, rng);
        UInt y = x;
        const UInt c = random_in<UInt>(1, n - 1, rng);
        for (;;) {
            x = step(x, c, n);
            y = step(step(y, c, n), c, n);
            const UInt d = detail::gcd(detail::abs_diff(x, y), n);
            ++report.iterations;
            if (d == n)
                break; // cycle closed without a split: fresh (x, c)
            if (d > 1) {
                report.factor = BigInt(d);
                return FactorStatus::Success;
            }
            if (report.iterations % kTimeoutCheckInterval == 0 && deadline.expired())
                return FactorStatus::Timeout;
        }
    }
}

template <class UInt>
FactorStatus rho_batched(const UInt &n, unsigned batch, Rng &rng, Deadline &deadline,
                         FactorReport &report) {
    for (;;) {
        UInt x = random_in<UInt>(2, n - 1, rng);
        UInt y = x;
        const UInt c = random_in<UInt>(1, n - 1, rng);
        bool restart = false;
        while (!restart) {
            const UInt x_saved = x, y_saved = y;
            UInt product = 1;
            for (unsigned i = 0; i < batch; ++i) {
                x = step(x, c, n);
                y = step(step(y, c, n), c, n);
                product = detail::mulmod(product, detail::abs_diff(x, y), n);
            }
            report.iterations += batch;
            UInt d = detail::gcd(product, n);
            if (d == n) {
                // Some term shared every factor of n; replay the batch one step at a time.
                x = x_saved;
                y = y_saved;
                for (unsigned i = 0; i < batch; ++i) {
                    x = step(x, c, n);
                    y = step(step(y, c, n), c, n);
                    d = detail::gcd(detail::abs_diff(x, y), n);
                    if (d != 1)
                        break;
                }
                if (d == n || d == 1) {
                    restart = true;
                    continue;
                }
            }
            if (d > 1) {
                report.factor = BigInt(d);
                return FactorStatus::Success;
            }
            if (report.iterations % kTimeoutCheckInterval < batch && deadline.expired())
                return FactorStatus::Timeout;
        }
    }
}

void require_target(const BigInt &n) {
    if (n <= 3)
        throw Error(Errc::InvalidArgument, "factoring target must exceed 3");
}

} // namespace

std::string to_string(Method method) {
    return method == Method::TrialDivision ? "TrialDivision" : "PollardRho";
}

std::string to_string(FactorStatus status) {
    switch (status) {
    case FactorStatus::Success: return "Success";
    case FactorStatus::Timeout: return "Timeout";
    case FactorStatus::NoFactor: return "NoFactor";
    }
    return "Unknown";
}

FactorReport trial_division(const BigInt &n, Seconds timeout) {
    require_target(n);
    FactorReport report;
    report.n = n;
    report.method = Method::TrialDivision;
    Deadline deadline(timeout);
    if (auto small = to_u64(n)) {
        const u64 limit = detail::isqrt(*small) + 1;
        report.status = trial_scan<u64>(*small, limit, deadline, report);
    } else {
        const BigInt limit = boost::multiprecision::sqrt(n) + 1;
        const u64 capped = to_u64(limit).value_or(UINT64_MAX - kTimeoutCheckInterval);
        report.status = trial_scan<BigInt>(n, capped, deadline, report);
    }
    report.elapsed = deadline.elapsed();
    return report;
}

FactorReport pollard_rho(const BigInt &n, Seconds timeout, std::uint64_t seed,
                         PollardOptions options) {
    require_target(n);
    FactorReport report;
    report.n = n;
    report.method = Method::PollardRho;
    Deadline deadline(timeout);
    if (n % 2 == 0) {
        report.factor = BigInt(2);
        report.status = FactorStatus::Success;
    } else if (is_probable_prime(n)) {
        report.status = FactorStatus::NoFactor;
    } else {
        Rng rng(seed);
        const unsigned batch = std::max(1u, options.batch_size);
        if (auto small = to_u64(n)) {
            report.status = options.batched_gcd
                                ? rho_batched<u64>(*small, batch, rng, deadline, report)
                                : rho_literal<u64>(*small, rng, deadline, report);
        } else {
            report.status = options.batched_gcd
                                ? rho_batched<BigInt>(n, batch, rng, deadline, report)
                                : rho_literal<BigInt>(n, rng, deadline, report);
        }
    }
    report.elapsed = deadline.elapsed();
    return report;
}

std::vector<FactorReport> factor_benchmark(std::span<const BigInt> targets,
                                           std::span<const Method> methods,
                                           Seconds timeout, std::uint64_t seed) {
    std::vector<FactorReport> reports;
    reports.reserve(targets.size() * methods.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (Method method : methods) {
            if (method == Method::TrialDivision)
                reports.push_back(trial_division(targets[t], timeout));
            else
                reports.push_back(pollard_rho(targets[t], timeout, Rng::derive(seed, t).next()));
        }
    }
    return reports;
}

std::string factor_csv_header() { return "n,method,factor,elapsed_s,status"; }

std::string to_csv_row(const FactorReport &report) {
    std::ostringstream out;
    out << to_string(report.n) << ',' << to_string(report.method) << ','
        << (report.factor ? to_string(*report.factor) : std::string()) << ',' << report.elapsed
        << ',' << to_string(report.status);
    return out.str();
}

} // namespace qlab::factorlab
