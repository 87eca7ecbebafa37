#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qlab/rng.hpp"

/// Dense statevector simulator.
///
/// Conventions: qubit 0 is the least-significant bit of a basis-state index.
/// The QFT maps |j> to 2^{-n/2} sum_k w^{jk} |k> with w = exp(2 pi i / 2^n).
namespace qlab::qsim {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 14;
inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kGateTolerance = 1e-12;

class StateVector {
  public:
    /// |0...0> on n_qubits qubits (1 <= n_qubits <= kMaxQubits).
    explicit StateVector(std::size_t n_qubits);

    static StateVector basis(std::size_t n_qubits, std::uint64_t index);

    /// Takes ownership of a 2^n amplitude array; it must be normalized.
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);

    std::size_t n_qubits() const noexcept { return n_qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    const Amplitude &operator[](std::size_t index) const { return amps_[index]; }

    double norm_squared() const;
    double probability(std::uint64_t index) const { return std::norm(amps_[index]); }

  private:
    StateVector(std::size_t n_qubits, std::vector<Amplitude> amplitudes);

    friend class StateEditor;

    std::size_t n_qubits_;
    std::vector<Amplitude> amps_;
};

enum class GateKind { H, X, Y, Z, Phase, CNOT, ControlledPhase, SWAP, ControlledSwap };

/// A gate and the qubits it acts on. For controlled gates the control comes
/// first in `targets`.
struct Gate {
    GateKind kind = GateKind::H;
    std::vector<std::size_t> targets;
    double angle = 0.0; // radians, Phase and ControlledPhase only

    static Gate h(std::size_t q) { return {GateKind::H, {q}}; }
    static Gate x(std::size_t q) { return {GateKind::X, {q}}; }
    static Gate y(std::size_t q) { return {GateKind::Y, {q}}; }
    static Gate z(std::size_t q) { return {GateKind::Z, {q}}; }
    static Gate phase(std::size_t q, double theta) { return {GateKind::Phase, {q}, theta}; }
    static Gate cnot(std::size_t control, std::size_t target) {
        return {GateKind::CNOT, {control, target}};
    }
    static Gate cphase(std::size_t control, std::size_t target, double theta) {
        return {GateKind::ControlledPhase, {control, target}, theta};
    }
    static Gate swap(std::size_t a, std::size_t b) { return {GateKind::SWAP, {a, b}}; }
    static Gate cswap(std::size_t control, std::size_t a, std::size_t b) {
        return {GateKind::ControlledSwap, {control, a, b}};
    }

    std::size_t arity() const;

    /// Dense 2^arity x 2^arity row-major matrix; bit j of a row/column index is
    /// the state of targets[j].
    std::vector<Amplitude> matrix() const;
};

StateVector state_new(std::size_t n_qubits);

/// Returns U|state>. Throws BadTargetIndex or DuplicateTargets.
StateVector apply_gate(StateVector state, const Gate &gate);

StateVector apply_circuit(StateVector state, std::span<const Gate> gates);

/// Permutes the basis values of the register [offset, offset + width) by
/// `mapping` on the branch where `control` is 1. `mapping` must be a bijection
/// on [0, 2^width).
StateVector apply_controlled_permutation(StateVector state, std::size_t control,
                                         std::size_t offset, std::size_t width,
                                         std::span<const std::uint64_t> mapping);

/// Probability of every outcome of `qubits`; bit j of an outcome is qubits[j].
std::vector<double> outcome_probabilities(const StateVector &state,
                                          std::span<const std::size_t> qubits);

struct Measurement {
    std::uint64_t outcome; // bit j = measured value of qubits[j]
    double probability;
    StateVector state; // collapsed and renormalized
};

Measurement measure(StateVector state, std::span<const std::size_t> qubits, Rng &rng);

/// Draws an index from a discrete distribution.
std::uint64_t sample_index(std::span<const double> probabilities, Rng &rng);

/// QFT on the register `qubits` (qubits[0] least significant): H and
/// controlled phase rotations followed by the register-reversing swaps.
StateVector qft(StateVector state, std::span<const std::size_t> qubits, bool inverse = false);

std::vector<Gate> qft_circuit(std::span<const std::size_t> qubits, bool inverse = false);

/// <a|b>
Amplitude inner_product(const StateVector &a, const StateVector &b);

/// |high> (x) |low>: low occupies qubits [0, low.n_qubits()).
StateVector tensor(const StateVector &low, const StateVector &high);

/// Debug dump: header `index,re,im,prob` then one row per amplitude.
void write_csv(std::ostream &out, const StateVector &state);

} // namespace qlab::qsim
