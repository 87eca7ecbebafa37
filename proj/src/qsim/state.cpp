#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "qlab/error.hpp"
#include "qlab/qsim.hpp"
#include "qlab/qsim_kernels.hpp"

namespace qlab::qsim {

namespace k = kernels::omp;
using kernels::Mat2;

// Private mutation hooks for the free operations below.
class StateEditor {
  public:
    static std::vector<Amplitude> &data(StateVector &s) { return s.amps_; }
    static StateVector make(std::size_t n, std::vector<Amplitude> amps) {
        return StateVector(n, std::move(amps));
    }
};

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Amplitude kI{0.0, 1.0};

void check_qubit_count(std::size_t n) {
    if (n == 0)
        throw Error(Errc::InvalidArgument, "a state needs at least one qubit");
    if (n > kMaxQubits)
        throw Error(Errc::TooManyQubits,
                    std::to_string(n) + " qubits exceeds the cap of " + std::to_string(kMaxQubits));
}

void check_targets(std::span<const std::size_t> targets, std::size_t n_qubits) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= n_qubits)
            throw Error(Errc::BadTargetIndex, "qubit " + std::to_string(targets[i]) +
                                                  " out of range for " + std::to_string(n_qubits) +
                                                  " qubits");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[i] == targets[j])
                throw Error(Errc::DuplicateTargets, "qubit " + std::to_string(targets[i]) +
                                                        " appears twice");
    }
}

Mat2 single_qubit_matrix(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::H: return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y: return {0.0, -kI, kI, 0.0};
    case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::Phase:
    case GateKind::ControlledPhase: return {1.0, 0.0, 0.0, std::polar(1.0, gate.angle)};
    case GateKind::CNOT: return {0.0, 1.0, 1.0, 0.0};
    default: break;
    }
    throw Error(Errc::InvalidArgument, "not a single-qubit kernel");
}

} // namespace

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dimension())
        throw Error(Errc::InvalidArgument, "basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw Error(Errc::InvalidArgument, "amplitude count must be a power of two >= 2");
    const auto n = static_cast<std::size_t>(std::countr_zero(dim));
    check_qubit_count(n);
    const double norm = k::norm_squared(amplitudes);
    if (std::abs(norm - 1.0) > kStateTolerance)
        throw Error(Errc::NotNormalized, "sum of squared amplitudes is " + std::to_string(norm));
    return StateVector(n, std::move(amplitudes));
}

double StateVector::norm_squared() const { return k::norm_squared(amps_); }

std::size_t Gate::arity() const {
    switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::Phase: return 1;
    case GateKind::CNOT:
    case GateKind::ControlledPhase:
    case GateKind::SWAP: return 2;
    case GateKind::ControlledSwap: return 3;
    }
    return 0;
}

std::vector<Amplitude> Gate::matrix() const {
    const std::size_t dim = std::size_t{1} << arity();
    std::vector<Amplitude> m(dim * dim, 0.0);
    auto at = [&](std::size_t row, std::size_t col) -> Amplitude & { return m[row * dim + col]; };
    switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::Phase: {
        const Mat2 u = single_qubit_matrix(*this);
        std::copy(u.begin(), u.end(), m.begin());
        break;
    }
    case GateKind::CNOT:
    case GateKind::ControlledPhase: {
        const Mat2 u = single_qubit_matrix(*this);
        // bit 0 = control, bit 1 = target
        at(0, 0) = at(2, 2) = 1.0;
        at(1, 1) = u[0];
        at(1, 3) = u[1];
        at(3, 1) = u[2];
        at(3, 3) = u[3];
        break;
    }
    case GateKind::SWAP:
        at(0, 0) = at(3, 3) = 1.0;
        at(1, 2) = at(2, 1) = 1.0;
        break;
    case GateKind::ControlledSwap:
        for (std::size_t i = 0; i < dim; ++i) {
            std::size_t j = i;
            if ((i & 1) && ((i >> 1) & 1) != ((i >> 2) & 1))
                j = i ^ 0b110;
            at(j, i) = 1.0;
        }
        break;
    }
    return m;
}

StateVector state_new(std::size_t n_qubits) { return StateVector(n_qubits); }

StateVector apply_gate(StateVector state, const Gate &gate) {
    if (gate.targets.size() != gate.arity())
        throw Error(Errc::InvalidArgument, "gate has the wrong number of targets");
    check_targets(gate.targets, state.n_qubits());
    auto &amps = StateEditor::data(state);
    const auto &t = gate.targets;
    switch (gate.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::Phase: k::apply_1q(amps, t[0], single_qubit_matrix(gate)); break;
    case GateKind::CNOT:
    case GateKind::ControlledPhase:
        k::apply_controlled_1q(amps, t[0], t[1], single_qubit_matrix(gate));
        break;
    case GateKind::SWAP: k::apply_swap(amps, t[0], t[1]); break;
    case GateKind::ControlledSwap: k::apply_controlled_swap(amps, t[0], t[1], t[2]); break;
    }
    return state;
}

StateVector apply_circuit(StateVector state, std::span<const Gate> gates) {
    for (const auto &gate : gates)
        state = apply_gate(std::move(state), gate);
    return state;
}

StateVector apply_controlled_permutation(StateVector state, std::size_t control,
                                         std::size_t offset, std::size_t width,
                                         std::span<const std::uint64_t> mapping) {
    if (width == 0 || offset + width > state.n_qubits())
        throw Error(Errc::BadTargetIndex, "register outside the state");
    if (control >= state.n_qubits())
        throw Error(Errc::BadTargetIndex, "control qubit out of range");
    if (control >= offset && control < offset + width)
        throw Error(Errc::DuplicateTargets, "control lies inside the permuted register");
    const std::size_t size = std::size_t{1} << width;
    if (mapping.size() != size)
        throw Error(Errc::InvalidArgument, "mapping must cover the whole register");
    std::vector<bool> seen(size, false);
    for (auto v : mapping) {
        if (v >= size || seen[v])
            throw Error(Errc::InvalidArgument, "mapping is not a permutation");
        seen[v] = true;
    }
    std::vector<Amplitude> out(state.dimension());
    k::apply_controlled_permutation(state.amplitudes(), out, control, offset, width, mapping);
    return StateEditor::make(state.n_qubits(), std::move(out));
}

std::vector<double> outcome_probabilities(const StateVector &state,
                                          std::span<const std::size_t> qubits) {
    check_targets(qubits, state.n_qubits());
    std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t outcome = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j)
            outcome |= ((i >> qubits[j]) & 1) << j;
        probs[outcome] += std::norm(amps[i]);
    }
    return probs;
}

std::uint64_t sample_index(std::span<const double> probabilities, Rng &rng) {
    double total = 0.0;
    for (double p : probabilities)
        total += p;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::uint64_t last_nonzero = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] <= 0.0)
            continue;
        acc += probabilities[i];
        last_nonzero = i;
        if (u < acc)
            return i;
    }
    return last_nonzero; // rounding left u just above the running sum
}

Measurement measure(StateVector state, std::span<const std::size_t> qubits, Rng &rng) {
    const auto probs = outcome_probabilities(state, qubits);
    const std::uint64_t outcome = sample_index(probs, rng);
    auto &amps = StateEditor::data(state);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t value = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j)
            value |= ((i >> qubits[j]) & 1) << j;
        if (value != outcome)
            amps[i] = 0.0;
    }
    k::scale(amps, 1.0 / std::sqrt(probs[outcome]));
    return {outcome, probs[outcome], std::move(state)};
}

std::vector<Gate> qft_circuit(std::span<const std::size_t> qubits, bool inverse) {
    std::vector<Gate> gates;
    const std::size_t m = qubits.size();
    for (std::size_t step = 0; step < m; ++step) {
        const std::size_t i = m - 1 - step; // most significant first
        gates.push_back(Gate::h(qubits[i]));
        for (std::size_t j = i; j-- > 0;)
            gates.push_back(Gate::cphase(qubits[j], qubits[i],
                                         std::numbers::pi / static_cast<double>(1ULL << (i - j))));
    }
    for (std::size_t i = 0; i < m / 2; ++i)
        gates.push_back(Gate::swap(qubits[i], qubits[m - 1 - i]));
    if (inverse) {
        std::reverse(gates.begin(), gates.end());
        for (auto &g : gates)
            g.angle = -g.angle;
    }
    return gates;
}

StateVector qft(StateVector state, std::span<const std::size_t> qubits, bool inverse) {
    check_targets(qubits, state.n_qubits());
    const auto gates = qft_circuit(qubits, inverse);
    return apply_circuit(std::move(state), gates);
}

Amplitude inner_product(const StateVector &a, const StateVector &b) {
    if (a.dimension() != b.dimension())
        throw Error(Errc::DimensionMismatch, "states have different dimensions");
    Amplitude sum = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i)
        sum += std::conj(a[i]) * b[i];
    return sum;
}

StateVector tensor(const StateVector &low, const StateVector &high) {
    const std::size_t n = low.n_qubits() + high.n_qubits();
    check_qubit_count(n);
    std::vector<Amplitude> amps(std::size_t{1} << n);
    for (std::size_t h = 0; h < high.dimension(); ++h)
        for (std::size_t l = 0; l < low.dimension(); ++l)
            amps[(h << low.n_qubits()) | l] = high[h] * low[l];
    return StateEditor::make(n, std::move(amps));
}

void write_csv(std::ostream &out, const StateVector &state) {
    out << "index,re,im,prob\n";
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < state.dimension(); ++i)
        out << i << ',' << state[i].real() << ',' << state[i].imag() << ','
            << std::norm(state[i]) << '\n';
    out.precision(old);
}

} // namespace qlab::qsim
