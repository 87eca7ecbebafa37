#include "qlab/qsim_kernels.hpp"

namespace qlab::qsim::kernels::serial {

namespace {
// Index of the k-th basis state whose bit `q` is zero.
inline std::size_t insert_zero(std::size_t k, std::size_t q) {
    const std::size_t low = k & ((std::size_t{1} << q) - 1);
    return ((k >> q) << (q + 1)) | low;
}
} // namespace

void apply_1q(std::span<Amplitude> amps, std::size_t target, const Mat2 &m) {
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << target;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(k, target);
        const std::size_t i1 = i0 | bit;
        const Amplitude a0 = amps[i0], a1 = amps[i1];
        amps[i0] = m[0] * a0 + m[1] * a1;
        amps[i1] = m[2] * a0 + m[3] * a1;
    }
}

void apply_controlled_1q(std::span<Amplitude> amps, std::size_t control, std::size_t target,
                         const Mat2 &m) {
    const std::size_t half = amps.size() / 2;
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t cbit = std::size_t{1} << control;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(k, target);
        if ((i0 & cbit) == 0)
            continue;
        const std::size_t i1 = i0 | bit;
        const Amplitude a0 = amps[i0], a1 = amps[i1];
        amps[i0] = m[0] * a0 + m[1] * a1;
        amps[i1] = m[2] * a0 + m[3] * a1;
    }
}

void apply_swap(std::span<Amplitude> amps, std::size_t a, std::size_t b) {
    const std::size_t abit = std::size_t{1} << a, bbit = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & abit) && !(i & bbit))
            std::swap(amps[i], amps[(i ^ abit) | bbit]);
}

void apply_controlled_swap(std::span<Amplitude> amps, std::size_t control, std::size_t a,
                           std::size_t b) {
    const std::size_t abit = std::size_t{1} << a, bbit = std::size_t{1} << b;
    const std::size_t cbit = std::size_t{1} << control;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & cbit) && (i & abit) && !(i & bbit))
            std::swap(amps[i], amps[(i ^ abit) | bbit]);
}

void apply_controlled_permutation(std::span<const Amplitude> in, std::span<Amplitude> out,
                                  std::size_t control, std::size_t offset, std::size_t width,
                                  std::span<const std::uint64_t> mapping) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t mask = ((std::size_t{1} << width) - 1) << offset;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if ((i & cbit) == 0) {
            out[i] = in[i];
            continue;
        }
        const std::size_t value = (i & mask) >> offset;
        out[(i & ~mask) | (static_cast<std::size_t>(mapping[value]) << offset)] = in[i];
    }
}

double norm_squared(std::span<const Amplitude> amps) {
    double sum = 0.0;
    for (const auto &a : amps)
        sum += std::norm(a);
    return sum;
}

void scale(std::span<Amplitude> amps, double factor) {
    for (auto &a : amps)
        a *= factor;
}

} // namespace qlab::qsim::kernels::serial
