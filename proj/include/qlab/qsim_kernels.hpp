#pragma once

// Amplitude-array kernels. `serial` is the reference implementation the tests
// compare against; `omp` is what StateVector uses. Both share signatures.
//
// Qubit q addresses bit q of the basis-state index (qubit 0 is the LSB).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace qlab::qsim::kernels {

using Amplitude = std::complex<double>;
/// Row-major 2x2 matrix: {m00, m01, m10, m11}.
using Mat2 = std::array<Amplitude, 4>;

/// Below this dimension the OpenMP kernels stay on one thread.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

#define QLAB_QSIM_KERNEL_DECLS                                                                   \
    void apply_1q(std::span<Amplitude> amps, std::size_t target, const Mat2 &m);                 \
    void apply_controlled_1q(std::span<Amplitude> amps, std::size_t control, std::size_t target, \
                             const Mat2 &m);                                                     \
    void apply_swap(std::span<Amplitude> amps, std::size_t a, std::size_t b);                    \
    void apply_controlled_swap(std::span<Amplitude> amps, std::size_t control, std::size_t a,    \
                               std::size_t b);                                                   \
    /* out[i'] = in[i], where i' replaces the register value v = bits [offset, offset+width) */  \
    /* of i by mapping[v] whenever the control bit of i is set. */                               \
    void apply_controlled_permutation(std::span<const Amplitude> in, std::span<Amplitude> out,   \
                                      std::size_t control, std::size_t offset, std::size_t width, \
                                      std::span<const std::uint64_t> mapping);                   \
    double norm_squared(std::span<const Amplitude> amps);                                        \
    void scale(std::span<Amplitude> amps, double factor);

namespace serial {
QLAB_QSIM_KERNEL_DECLS
} // namespace serial

namespace omp {
QLAB_QSIM_KERNEL_DECLS
} // namespace omp

#undef QLAB_QSIM_KERNEL_DECLS

} // namespace qlab::qsim::kernels
