#include <cmath>
#include <numeric>
#include <sstream>

#include "qlab/error.hpp"
#include "qlab/qsim.hpp"
#include "qlab/shor.hpp"

namespace qlab::shor {

namespace {

using qsim::Amplitude;
using qsim::StateVector;

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1)
            result = result * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return result;
}

std::size_t ceil_log2(std::uint64_t n) {
    std::size_t bits = 0;
    while ((std::uint64_t{1} << bits) < n)
        ++bits;
    return bits;
}

bool is_prime(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

bool is_prime_power(std::uint64_t n) {
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0)
            continue;
        std::uint64_t m = n;
        while (m % p == 0)
            m /= p;
        return m == 1;
    }
    return false;
}

void check_modulus(std::uint64_t a, std::uint64_t n) {
    if (n < 3 || n > kMaxModulus)
        throw Error(Errc::TooLargeForSimulation,
                    "modulus must lie in [3, " + std::to_string(kMaxModulus) + "]");
    if (a < 2 || a >= n)
        throw Error(Errc::InvalidArgument, "base must satisfy 1 < a < n");
    if (std::gcd(a, n) != 1)
        throw Error(Errc::NotCoprime, "gcd(a, n) > 1");
}

PeriodRoute resolve(PeriodRoute route, const RegisterLayout &layout) {
    if (route != PeriodRoute::Auto)
        return route;
    return layout.total() <= qsim::kMaxQubits ? PeriodRoute::JointRegister
                                              : PeriodRoute::DeferredTarget;
}

std::vector<std::size_t> source_qubits(const RegisterLayout &layout) {
    std::vector<std::size_t> qubits(layout.source);
    std::iota(qubits.begin(), qubits.end(), std::size_t{0});
    return qubits;
}

// Source register after H^t, controlled multiplications and the inverse QFT,
// with the target register alongside.
StateVector joint_state(std::uint64_t a, std::uint64_t n, const RegisterLayout &layout) {
    const std::size_t t = layout.source, m = layout.target;
    StateVector s(layout.total()); // throws TooManyQubits past the cap
    s = qsim::apply_gate(std::move(s), qsim::Gate::x(t)); // target = |1>
    for (std::size_t j = 0; j < t; ++j)
        s = qsim::apply_gate(std::move(s), qsim::Gate::h(j));
    std::vector<std::uint64_t> mapping(std::uint64_t{1} << m);
    std::uint64_t multiplier = a % n; // a^(2^j)
    for (std::size_t j = 0; j < t; ++j) {
        for (std::uint64_t y = 0; y < mapping.size(); ++y)
            mapping[y] = y < n ? y * multiplier % n : y;
        s = qsim::apply_controlled_permutation(std::move(s), j, t, m, mapping);
        multiplier = multiplier * multiplier % n;
    }
    const auto source = source_qubits(layout);
    return qsim::qft(std::move(s), source, /*inverse=*/true);
}

// Source register collapsed onto {x : a^x mod n = value}, after the inverse QFT.
StateVector deferred_state(std::uint64_t a, std::uint64_t n, const RegisterLayout &layout,
                           std::uint64_t value) {
    const std::uint64_t q = std::uint64_t{1} << layout.source;
    std::vector<Amplitude> amps(q, 0.0);
    std::size_t count = 0;
    for (std::uint64_t x = 0; x < q; ++x)
        if (powmod(a, x, n) == value)
            ++count;
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::uint64_t x = 0; x < q; ++x)
        if (powmod(a, x, n) == value)
            amps[x] = amplitude;
    auto s = StateVector::from_amplitudes(std::move(amps));
    const auto source = source_qubits(layout);
    return qsim::qft(std::move(s), source, /*inverse=*/true);
}

} // namespace

std::string to_string(ShorStatus status) {
    switch (status) {
    case ShorStatus::Factored: return "Factored";
    case ShorStatus::LuckyGcd: return "LuckyGcd";
    case ShorStatus::Exhausted: return "Exhausted";
    }
    return "Unknown";
}

RegisterLayout register_layout(std::uint64_t n) {
    const double log_n = std::log2(static_cast<double>(n));
    return {static_cast<std::size_t>(std::ceil(2.0 * log_n)), ceil_log2(n)};
}

std::optional<std::uint64_t> continued_fraction_period(std::uint64_t y, std::uint64_t q,
                                                       std::uint64_t n) {
    if (y == 0 || y >= q)
        return std::nullopt;
    // Convergents h/k of y/q; recurrence h_i = a_i h_{i-1} + h_{i-2}.
    std::uint64_t num = y, den = q;
    std::uint64_t h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
    while (den != 0) {
        const std::uint64_t term = num / den;
        const std::uint64_t h = term * h_prev + h_prev2;
        const std::uint64_t k = term * k_prev + k_prev2;
        if (k >= n)
            break;
        const auto error = static_cast<std::int64_t>(y * k) - static_cast<std::int64_t>(h * q);
        if (k > 1 && 2 * static_cast<std::uint64_t>(std::llabs(error)) <= k)
            return k;
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const std::uint64_t rem = num % den;
        num = den;
        den = rem;
    }
    return std::nullopt;
}

std::vector<double> source_distribution(std::uint64_t a, std::uint64_t n, PeriodRoute route) {
    check_modulus(a, n);
    const auto layout = register_layout(n);
    const auto source = source_qubits(layout);
    if (resolve(route, layout) == PeriodRoute::JointRegister)
        return qsim::outcome_probabilities(joint_state(a, n, layout), source);

    // Mix the conditional distributions, weighted by how often each target value occurs.
    const std::uint64_t q = std::uint64_t{1} << layout.source;
    std::vector<std::size_t> weight(n, 0);
    for (std::uint64_t x = 0; x < q; ++x)
        ++weight[powmod(a, x, n)];
    std::vector<double> mixed(q, 0.0);
    for (std::uint64_t value = 0; value < n; ++value) {
        if (weight[value] == 0)
            continue;
        const auto conditional =
            qsim::outcome_probabilities(deferred_state(a, n, layout, value), source);
        const double p = static_cast<double>(weight[value]) / static_cast<double>(q);
        for (std::uint64_t y = 0; y < q; ++y)
            mixed[y] += p * conditional[y];
    }
    return mixed;
}

PeriodSample sample_period(std::uint64_t a, std::uint64_t n, Rng &rng, PeriodRoute route) {
    check_modulus(a, n);
    const auto layout = register_layout(n);
    const auto source = source_qubits(layout);
    PeriodSample sample;
    sample.q = std::uint64_t{1} << layout.source;
    sample.route = resolve(route, layout);
    if (sample.route == PeriodRoute::JointRegister) {
        sample.measured = qsim::measure(joint_state(a, n, layout), source, rng).outcome;
    } else {
        const std::uint64_t value = powmod(a, rng.below(sample.q), n);
        sample.measured = qsim::measure(deferred_state(a, n, layout, value), source, rng).outcome;
    }
    sample.r = continued_fraction_period(sample.measured, sample.q, n);
    return sample;
}

std::optional<std::uint64_t> quantum_period_find(std::uint64_t a, std::uint64_t n, Rng &rng) {
    return sample_period(a, n, rng).r;
}

std::optional<std::uint64_t> quantum_period_find(std::uint64_t a, std::uint64_t n,
                                                 std::uint64_t seed) {
    Rng rng(seed);
    return quantum_period_find(a, n, rng);
}

ShorOutcome shor_factor(std::uint64_t n, std::uint64_t seed, std::size_t max_attempts,
                        std::optional<std::uint64_t> forced_base) {
    if (n % 2 == 0)
        throw Error(Errc::EvenInput, std::to_string(n) + " is even");
    if (n > kMaxModulus)
        throw Error(Errc::TooLargeForSimulation,
                    std::to_string(n) + " exceeds the simulated limit " +
                        std::to_string(kMaxModulus));
    if (n < 3 || is_prime(n))
        throw Error(Errc::PrimeInput, std::to_string(n) + " is not composite");
    if (is_prime_power(n))
        throw Error(Errc::PrimePowerInput, std::to_string(n) + " is a prime power");
    if (forced_base && (*forced_base < 2 || *forced_base >= n))
        throw Error(Errc::InvalidArgument, "forced base must satisfy 1 < a < n");

    Rng rng(seed);
    ShorOutcome outcome;
    outcome.n = n;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        outcome.attempts = attempt;
        const std::uint64_t a = forced_base ? *forced_base : rng.between(2, n - 1);
        outcome.a = a;
        outcome.r.reset();
        if (const std::uint64_t g = std::gcd(a, n); g > 1) {
            outcome.factors = std::minmax(g, n / g);
            outcome.status = ShorStatus::LuckyGcd;
            return outcome;
        }
        const auto r = quantum_period_find(a, n, rng);
        if (!r || powmod(a, *r, n) != 1)
            continue;
        outcome.r = r;
        if (*r % 2 != 0)
            continue;
        const std::uint64_t half = powmod(a, *r / 2, n);
        if (half == n - 1)
            continue;
        for (std::uint64_t candidate : {std::gcd(half + n - 1, n), std::gcd(half + 1, n)}) {
            if (candidate > 1 && candidate < n) {
                outcome.factors = std::minmax(candidate, n / candidate);
                outcome.status = ShorStatus::Factored;
                return outcome;
            }
        }
    }
    outcome.status = ShorStatus::Exhausted;
    return outcome;
}

std::string shor_csv_header() { return "n,a,r,factor1,factor2,attempts,status"; }

std::string to_csv_row(const ShorOutcome &o) {
    std::ostringstream out;
    out << o.n << ',' << o.a << ',' << (o.r ? std::to_string(*o.r) : "") << ','
        << (o.factors ? std::to_string(o.factors->first) : "") << ','
        << (o.factors ? std::to_string(o.factors->second) : "") << ',' << o.attempts << ','
        << to_string(o.status);
    return out.str();
}

} // namespace qlab::shor
