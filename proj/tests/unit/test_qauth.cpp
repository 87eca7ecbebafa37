#include <cmath>

#include "doctest.h"

#include "qlab/error.hpp"
#include "qlab/qauth.hpp"

using namespace qlab;
using namespace qlab::qauth;

namespace {

Errc error_code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &err) {
        return err.code();
    }
    FAIL("expected qlab::Error");
    return Errc::InvalidArgument;
}

std::vector<std::uint8_t> random_message(std::size_t n, Rng &rng) {
    std::vector<std::uint8_t> m(n);
    for (auto &b : m)
        b = std::uint8_t(rng.next());
    return m;
}

// |<a|b>|^2 by direct summation.
double overlap_squared(const StateVector &a, const StateVector &b) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i)
        acc += std::conj(a[i]) * b[i];
    return std::norm(acc);
}

StateVector one_qubit(double theta) {
    return StateVector::from_amplitudes({std::cos(theta), std::sin(theta)});
}

} // namespace

TEST_CASE("fingerprint encoding") {
    const std::string text = "attack at dawn";
    const std::vector<std::uint8_t> msg(text.begin(), text.end());
    const auto a = fingerprint_create(msg, 3);
    const auto b = fingerprint_create(msg, 3);
    CHECK(a.digest == sha256(msg));
    REQUIRE(a.state.dimension() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(a.state[i] == b.state[i]);
        CHECK(std::abs(std::abs(a.state[i]) - 1.0 / std::sqrt(8.0)) < 1e-15);
        const int bit = (a.digest[0] >> (7 - i)) & 1;
        CHECK((a.state[i].real() < 0) == (bit == 1));
    }
    CHECK(std::abs(a.state.norm_squared() - 1.0) < 1e-12);

    for (std::size_t m = kMinQubits; m <= kMaxQubits; ++m) {
        const auto fp = fingerprint_create(msg, m);
        CHECK(fp.state.n_qubits() == m);
        CHECK(std::abs(fp.state.norm_squared() - 1.0) < 1e-9);
    }
    CHECK(error_code_of([&] { fingerprint_create(msg, 1); }) == Errc::QubitCountOutOfRange);
    CHECK(error_code_of([&] { fingerprint_create(msg, 11); }) == Errc::QubitCountOutOfRange);
}

TEST_CASE("one-byte changes move the state") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        auto msg = random_message(1 + rng.below(200), rng);
        const auto a = fingerprint_create(msg, kDefaultQubits);
        msg[rng.below(msg.size())] ^= std::uint8_t(1 + rng.below(255));
        const auto b = fingerprint_create(msg, kDefaultQubits);
        CHECK(overlap_squared(a.state, b.state) < 1.0 - 1e-12);
    }
}

TEST_CASE("compression") {
    Rng rng(1);
    const auto msg = random_message(1024, rng);
    for (std::size_t m = kMinQubits; m <= kMaxQubits; ++m)
        CHECK(fingerprint_create(msg, m).state.dimension() < 8 * msg.size());
}

TEST_CASE("swap test examples") {
    Rng rng(7);
    const std::string text = "same";
    const std::vector<std::uint8_t> msg(text.begin(), text.end());
    const auto a = fingerprint_create(msg, 4);
    CHECK(swap_test(a, a, 1000, rng) == 1.0);

    const auto zero = one_qubit(0.0);
    const auto one = one_qubit(M_PI / 2);
    CHECK(std::abs(swap_test(zero, one, 10000, rng) - 0.5) <= 0.02);
    const auto plus = one_qubit(M_PI / 4);
    REQUIRE(overlap_squared(zero, plus) == doctest::Approx(0.5));
    CHECK(std::abs(swap_test(zero, plus, 10000, rng) - 0.75) <= 0.02);

    CHECK(error_code_of([&] { swap_test(a, fingerprint_create(msg, 5), 10, rng); }) ==
          Errc::DimensionMismatch);
}

TEST_CASE("per-trial accept probability within 3 sigma for constructed overlaps") {
    Rng rng(19);
    const std::size_t trials = 20000;
    for (double target : {0.0, 0.25, 0.5, 1.0}) {
        const auto a = one_qubit(0.0);
        const auto b = one_qubit(std::acos(std::sqrt(target)));
        const double ov = overlap_squared(a, b);
        REQUIRE(std::abs(ov - target) < 1e-12);
        const double p = 0.5 + ov / 2;
        CHECK(swap_accept_probability(a, b) == doctest::Approx(p).epsilon(1e-12));
        const double sigma = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(swap_test(a, b, trials, rng) - p) <= 3 * sigma + 1e-12);
    }
}

TEST_CASE("circuit accept probability matches the overlap formula") {
    Rng rng(5);
    for (std::size_t m = kMinQubits; m <= kMaxQubits; ++m) {
        for (int i = 0; i < 5; ++i) {
            const auto a = fingerprint_create(random_message(16, rng), m);
            const auto b = fingerprint_create(random_message(16, rng), m);
            const double expected = 0.5 + overlap_squared(a.state, b.state) / 2;
            CHECK(std::abs(swap_accept_probability(a.state, b.state) - expected) < 1e-9);
        }
    }
    // Sign-encoded 2-qubit states give overlap^2 in {0, 1/4, 1}.
    const auto s = [](double x0, double x1, double x2, double x3) {
        return StateVector::from_amplitudes({x0 / 2, x1 / 2, x2 / 2, x3 / 2});
    };
    CHECK(swap_accept_probability(s(1, 1, 1, 1), s(1, 1, 1, -1)) == doctest::Approx(0.625));
    CHECK(swap_accept_probability(s(1, 1, 1, 1), s(1, 1, -1, -1)) == doctest::Approx(0.5));
}

TEST_CASE("authentication") {
    Rng rng(13);
    const std::string text = "transfer 100 units";
    const std::vector<std::uint8_t> msg(text.begin(), text.end());
    const auto fp = fingerprint_create(msg, kDefaultQubits);
    const auto ok = authenticate(msg, fp, 0.9, 64, rng);
    CHECK(ok.decision == Decision::Accept);
    CHECK(ok.accept_fraction == 1.0);
    CHECK(error_code_of([&] { authenticate(msg, fp, 0.4, 64, rng); }) == Errc::InvalidThreshold);
    CHECK(error_code_of([&] { authenticate(msg, fp, 1.0, 64, rng); }) == Errc::InvalidThreshold);

    std::size_t rejected = 0;
    const std::size_t runs = 1000;
    for (std::size_t i = 0; i < runs; ++i) {
        auto m = random_message(64, rng);
        const auto claimed = fingerprint_create(m, kDefaultQubits);
        const auto bit = rng.below(8 * m.size());
        m[bit / 8] ^= std::uint8_t(1u << (bit % 8));
        rejected += authenticate(m, claimed, 0.9, 256, rng).decision == Decision::Reject;
    }
    CHECK(double(rejected) / runs >= 0.99);
}

TEST_CASE("serialization") {
    const std::vector<std::uint8_t> msg{1, 2, 3};
    const auto fp = fingerprint_create(msg, 7);
    const auto hex = to_hex(fp);
    CHECK(hex.size() == 66);
    CHECK(hex.substr(0, 2) == "07");
    const auto back = fingerprint_from_hex(hex);
    CHECK(back.m_qubits == 7);
    CHECK(back.digest == fp.digest);
    CHECK(std::abs(overlap_squared(back.state, fp.state) - 1.0) < 1e-12);
    CHECK(error_code_of([] { fingerprint_from_hex("0102"); }) == Errc::ParseError);
    CHECK(error_code_of([&] { fingerprint_from_hex("0c" + hex.substr(2)); }) ==
          Errc::QubitCountOutOfRange);
}
