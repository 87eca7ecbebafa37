#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "qlab/error.hpp"
#include "qlab/qsim.hpp"
#include "qlab/qsim_kernels.hpp"

using namespace qlab;
using namespace qlab::qsim;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector random_state(std::size_t n, Rng &rng) {
    std::vector<Amplitude> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : amps) {
        a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
        norm += std::norm(a);
    }
    for (auto &a : amps)
        a /= std::sqrt(norm);
    return StateVector::from_amplitudes(std::move(amps));
}

double max_diff(const StateVector &a, const StateVector &b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// Oracle: embed the gate's dense matrix and multiply basis-state by basis-state.
StateVector apply_dense(const StateVector &s, const Gate &g) {
    const auto m = g.matrix();
    const std::size_t local = std::size_t{1} << g.arity();
    std::vector<Amplitude> out(s.dimension(), 0.0);
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < g.targets.size(); ++j)
            col |= ((i >> g.targets[j]) & 1) << j;
        for (std::size_t row = 0; row < local; ++row) {
            std::size_t target_index = i;
            for (std::size_t j = 0; j < g.targets.size(); ++j) {
                target_index &= ~(std::size_t{1} << g.targets[j]);
                target_index |= ((row >> j) & 1) << g.targets[j];
            }
            out[target_index] += m[row * local + col] * s[i];
        }
    }
    return StateVector::from_amplitudes(std::move(out));
}

std::vector<Gate> all_gate_kinds(std::size_t n) {
    return {Gate::h(0),          Gate::x(n - 1),        Gate::y(1),
            Gate::z(2),          Gate::phase(1, 0.37),  Gate::cnot(2, 0),
            Gate::cnot(0, n - 1), Gate::cphase(1, 3, -1.1), Gate::swap(0, 3),
            Gate::cswap(2, 0, 3), Gate::cswap(0, n - 1, 1)};
}

Errc error_code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &err) {
        return err.code();
    }
    FAIL("expected qlab::Error");
    return Errc::InvalidArgument;
}

} // namespace

TEST_CASE("state_new produces |0...0> and enforces the cap") {
    const auto one = state_new(1);
    REQUIRE(one.dimension() == 2);
    CHECK(one[0] == Amplitude(1.0));
    CHECK(one[1] == Amplitude(0.0));
    const auto two = state_new(2);
    CHECK(two[0] == Amplitude(1.0));
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(two[i] == Amplitude(0.0));
    CHECK(state_new(kMaxQubits).dimension() == 16384);
    CHECK(error_code_of([] { state_new(15); }) == Errc::TooManyQubits);
    CHECK(error_code_of([] { state_new(0); }) == Errc::InvalidArgument);
    CHECK(error_code_of([] { StateVector::from_amplitudes({1.0, 1.0}); }) == Errc::NotNormalized);
}

TEST_CASE("single-qubit gate examples") {
    const auto plus = apply_gate(state_new(1), Gate::h(0));
    CHECK(std::abs(plus[0] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(plus[1] - kInvSqrt2) < kGateTolerance);

    const auto minus = apply_gate(StateVector::basis(1, 1), Gate::h(0));
    CHECK(std::abs(minus[0] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(minus[1] + kInvSqrt2) < kGateTolerance);

    const auto flipped = apply_gate(state_new(1), Gate::x(0));
    CHECK(flipped[0] == Amplitude(0.0));
    CHECK(flipped[1] == Amplitude(1.0));
}

TEST_CASE("H then CNOT prepares the Bell state") {
    auto s = apply_gate(state_new(2), Gate::h(0));
    s = apply_gate(std::move(s), Gate::cnot(0, 1));
    CHECK(std::abs(s[0b00] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(s[0b11] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(s[0b01]) < kGateTolerance);
    CHECK(std::abs(s[0b10]) < kGateTolerance);
}

TEST_CASE("every gate matrix is unitary") {
    for (const auto &g : all_gate_kinds(5)) {
        const auto m = g.matrix();
        const std::size_t d = std::size_t{1} << g.arity();
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                Amplitude sum = 0.0;
                for (std::size_t k = 0; k < d; ++k)
                    sum += std::conj(m[k * d + r]) * m[k * d + c];
                CHECK(std::abs(sum - Amplitude(r == c ? 1.0 : 0.0)) < kGateTolerance);
            }
    }
}

TEST_CASE("kernels agree with the dense-matrix oracle") {
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_state(5, rng);
        for (const auto &g : all_gate_kinds(5))
            CHECK(max_diff(apply_gate(s, g), apply_dense(s, g)) < kGateTolerance);
    }
}

TEST_CASE("gate involutions on random states") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = random_state(4, rng);
        for (const Gate &g : {Gate::x(1), Gate::h(2), Gate::cnot(3, 0), Gate::swap(0, 2)})
            CHECK(max_diff(apply_gate(apply_gate(s, g), g), s) < kGateTolerance);
    }
}

TEST_CASE("norm is preserved by long random circuits") {
    Rng rng(3);
    auto s = random_state(8, rng);
    for (int step = 0; step < 2000; ++step) {
        const auto a = rng.below(8);
        auto b = rng.below(8);
        while (b == a)
            b = rng.below(8);
        auto c = rng.below(8);
        while (c == a || c == b)
            c = rng.below(8);
        switch (rng.below(6)) {
        case 0: s = apply_gate(std::move(s), Gate::h(a)); break;
        case 1: s = apply_gate(std::move(s), Gate::y(a)); break;
        case 2: s = apply_gate(std::move(s), Gate::phase(a, rng.uniform() * 6.0)); break;
        case 3: s = apply_gate(std::move(s), Gate::cnot(a, b)); break;
        case 4: s = apply_gate(std::move(s), Gate::cphase(a, b, rng.uniform())); break;
        default: s = apply_gate(std::move(s), Gate::cswap(a, b, c)); break;
        }
    }
    CHECK(std::abs(s.norm_squared() - 1.0) < kStateTolerance);
}

TEST_CASE("target validation") {
    const auto s = state_new(3);
    CHECK(error_code_of([&] { apply_gate(s, Gate::h(3)); }) == Errc::BadTargetIndex);
    CHECK(error_code_of([&] { apply_gate(s, Gate::cnot(1, 1)); }) == Errc::DuplicateTargets);
    const std::vector<std::size_t> bad{0, 7};
    Rng rng(0);
    CHECK(error_code_of([&] { measure(s, bad, rng); }) == Errc::BadTargetIndex);
    CHECK(error_code_of([&] { qft(s, bad); }) == Errc::BadTargetIndex);
}

TEST_CASE("measurement examples") {
    Rng rng(4);
    const std::vector<std::size_t> q0{0};
    const auto one = measure(StateVector::basis(1, 1), q0, rng);
    CHECK(one.outcome == 1);
    CHECK(one.probability == doctest::Approx(1.0));

    const auto plus = apply_gate(state_new(1), Gate::h(0));
    int ones = 0;
    constexpr int kTrials = 100000;
    for (int t = 0; t < kTrials; ++t)
        ones += static_cast<int>(measure(plus, q0, rng).outcome);
    CHECK(std::abs(ones / double(kTrials) - 0.5) <= 0.01);

    auto bell = apply_gate(apply_gate(state_new(2), Gate::h(0)), Gate::cnot(0, 1));
    const std::vector<std::size_t> q1{1};
    for (int t = 0; t < 200; ++t) {
        const auto first = measure(bell, q0, rng);
        const auto second = measure(first.state, q1, rng);
        CHECK(second.outcome == first.outcome);
        CHECK(second.probability == doctest::Approx(1.0));
    }
}

TEST_CASE("collapse zeroes non-matching amplitudes and renormalizes") {
    Rng rng(5);
    const auto s = random_state(4, rng);
    const std::vector<std::size_t> qubits{3, 1};
    const auto m = measure(s, qubits, rng);
    CHECK(std::abs(m.state.norm_squared() - 1.0) < kStateTolerance);
    for (std::size_t i = 0; i < 16; ++i) {
        const std::uint64_t value = ((i >> 3) & 1) | (((i >> 1) & 1) << 1);
        if (value != m.outcome)
            CHECK(m.state[i] == Amplitude(0.0));
        else
            CHECK(std::abs(m.state[i] - s[i] / std::sqrt(m.probability)) < 1e-12);
    }
}

TEST_CASE("measurement statistics pass a chi-square test") {
    Rng rng(6);
    const auto s = random_state(3, rng);
    const std::vector<std::size_t> all{0, 1, 2};
    const auto probs = outcome_probabilities(s, all);
    std::vector<int> counts(8, 0);
    constexpr int kSamples = 100000;
    for (int t = 0; t < kSamples; ++t)
        ++counts[measure(s, all, rng).outcome];
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        const double expected = probs[i] * kSamples;
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    CHECK(chi2 < 24.3219); // chi-square 0.999 quantile, 7 degrees of freedom
}

TEST_CASE("qft examples") {
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<std::size_t> reg(n);
        for (std::size_t i = 0; i < n; ++i)
            reg[i] = i;
        const auto uniform = qft(state_new(n), reg);
        const double expect = 1.0 / std::sqrt(double(1u << n));
        for (std::size_t i = 0; i < uniform.dimension(); ++i)
            CHECK(std::abs(uniform[i] - expect) < kStateTolerance);
    }
    const std::vector<std::size_t> reg{0, 1};
    const auto s = qft(StateVector::basis(2, 0b01), reg);
    const Amplitude expected[] = {{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0, -0.5}};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(s[i] - expected[i]) < kStateTolerance);
}

TEST_CASE("qft matches the DFT matrix for every basis state") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const std::size_t dim = std::size_t{1} << n;
        std::vector<std::size_t> reg(n);
        for (std::size_t i = 0; i < n; ++i)
            reg[i] = i;
        for (std::size_t j = 0; j < dim; ++j) {
            const auto forward = qft(StateVector::basis(n, j), reg);
            const auto backward = qft(StateVector::basis(n, j), reg, true);
            for (std::size_t k = 0; k < dim; ++k) {
                const double angle = 2.0 * std::numbers::pi * double(j * k % dim) / double(dim);
                const Amplitude w = std::polar(1.0 / std::sqrt(double(dim)), angle);
                CHECK(std::abs(forward[k] - w) < kStateTolerance);
                CHECK(std::abs(backward[k] - std::conj(w)) < kStateTolerance);
            }
        }
    }
}

TEST_CASE("inverse qft undoes qft on every basis state up to 6 qubits") {
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<std::size_t> reg(n);
        for (std::size_t i = 0; i < n; ++i)
            reg[i] = i;
        for (std::uint64_t j = 0; j < (1u << n); ++j) {
            const auto s = StateVector::basis(n, j);
            CHECK(max_diff(qft(qft(s, reg), reg, true), s) < kStateTolerance);
        }
    }
}

TEST_CASE("qft on a sub-register of a random state round-trips") {
    Rng rng(7);
    const auto s = random_state(7, rng);
    const std::vector<std::size_t> reg{2, 3, 4, 5};
    CHECK(max_diff(qft(qft(s, reg, true), reg), s) < kStateTolerance);
}

TEST_CASE("controlled permutation acts only on the control-1 branch") {
    // Register = qubits 1..2, control = qubit 0; mapping adds 1 mod 4.
    const std::vector<std::uint64_t> plus_one{1, 2, 3, 0};
    auto s = apply_gate(state_new(3), Gate::h(0));
    s = apply_controlled_permutation(std::move(s), 0, 1, 2, plus_one);
    CHECK(std::abs(s[0b000] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(s[0b011] - kInvSqrt2) < kGateTolerance);
    const std::vector<std::uint64_t> not_bijective{0, 0, 1, 2};
    CHECK(error_code_of([&] { apply_controlled_permutation(s, 0, 1, 2, not_bijective); }) ==
          Errc::InvalidArgument);
    CHECK(error_code_of([&] { apply_controlled_permutation(s, 1, 1, 2, plus_one); }) ==
          Errc::DuplicateTargets);
}

TEST_CASE("tensor and inner product") {
    const auto plus = apply_gate(state_new(1), Gate::h(0));
    const auto one = StateVector::basis(2, 2);
    const auto joint = tensor(plus, one); // qubit 0 = plus, qubits 1..2 = |10>
    CHECK(std::abs(joint[0b100] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(joint[0b101] - kInvSqrt2) < kGateTolerance);
    CHECK(std::abs(inner_product(plus, plus) - 1.0) < kGateTolerance);
    CHECK(std::abs(inner_product(state_new(1), StateVector::basis(1, 1))) < kGateTolerance);
    CHECK(error_code_of([&] { tensor(state_new(8), state_new(7)); }) == Errc::TooManyQubits);
}

TEST_CASE("csv dump") {
    std::ostringstream out;
    write_csv(out, StateVector::basis(1, 1));
    CHECK(out.str() == "index,re,im,prob\n0,0,0,0\n1,1,0,1\n");
}

TEST_CASE("openmp kernels reproduce the serial reference at full width") {
    namespace ks = kernels::serial;
    namespace ko = kernels::omp;
    Rng rng(8);
    const auto s = random_state(kMaxQubits, rng);
    const std::vector<Amplitude> base(s.amplitudes().begin(), s.amplitudes().end());
    const kernels::Mat2 m{Amplitude(0.6, 0.0), Amplitude(0.0, 0.8), Amplitude(0.0, 0.8),
                          Amplitude(0.6, 0.0)};
    auto a = base, b = base;
    ks::apply_1q(a, 5, m);
    ko::apply_1q(b, 5, m);
    CHECK(a == b);
    ks::apply_controlled_1q(a, 13, 0, m);
    ko::apply_controlled_1q(b, 13, 0, m);
    CHECK(a == b);
    ks::apply_swap(a, 2, 11);
    ko::apply_swap(b, 2, 11);
    CHECK(a == b);
    ks::apply_controlled_swap(a, 7, 1, 12);
    ko::apply_controlled_swap(b, 7, 1, 12);
    CHECK(a == b);
    std::vector<std::uint64_t> perm(16);
    for (std::uint64_t v = 0; v < 16; ++v)
        perm[v] = (v * 7 + 3) % 16;
    std::vector<Amplitude> pa(a.size()), pb(b.size());
    ks::apply_controlled_permutation(a, pa, 0, 4, 4, perm);
    ko::apply_controlled_permutation(b, pb, 0, 4, 4, perm);
    CHECK(pa == pb);
    CHECK(std::abs(ks::norm_squared(pa) - ko::norm_squared(pb)) < 1e-12);
    ks::scale(pa, 0.5);
    ko::scale(pb, 0.5);
    CHECK(pa == pb);
}
