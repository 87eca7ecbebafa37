#include <cstdint>

#include "qlab/qsim_kernels.hpp"

namespace qlab::qsim::kernels::omp {

namespace {
inline std::size_t insert_zero(std::size_t k, std::size_t q) {
    const std::size_t low = k & ((std::size_t{1} << q) - 1);
    return ((k >> q) << (q + 1)) | low;
}
} // namespace

void apply_1q(std::span<Amplitude> amps, std::size_t target, const Mat2 &m) {
    const auto half = static_cast<std::int64_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << target;
    Amplitude *data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
    for (std::int64_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), target);
        const std::size_t i1 = i0 | bit;
        const Amplitude a0 = data[i0], a1 = data[i1];
        data[i0] = m[0] * a0 + m[1] * a1;
        data[i1] = m[2] * a0 + m[3] * a1;
    }
}

void apply_controlled_1q(std::span<Amplitude> amps, std::size_t control, std::size_t target,
                         const Mat2 &m) {
    const auto half = static_cast<std::int64_t>(amps.size() / 2);
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t cbit = std::size_t{1} << control;
    Amplitude *data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
    for (std::int64_t k = 0; k < half; ++k) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(k), target);
        if ((i0 & cbit) == 0)
            continue;
        const std::size_t i1 = i0 | bit;
        const Amplitude a0 = data[i0], a1 = data[i1];
        data[i0] = m[0] * a0 + m[1] * a1;
        data[i1] = m[2] * a0 + m[3] * a1;
    }
}

void apply_swap(std::span<Amplitude> amps, std::size_t a, std::size_t b) {
    const std::size_t abit = std::size_t{1} << a, bbit = std::size_t{1} << b;
    const auto dim = static_cast<std::int64_t>(amps.size());
    Amplitude *data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
    for (std::int64_t s = 0; s < dim; ++s) {
        const auto i = static_cast<std::size_t>(s);
        if ((i & abit) && !(i & bbit))
            std::swap(data[i], data[(i ^ abit) | bbit]);
    }
}

void apply_controlled_swap(std::span<Amplitude> amps, std::size_t control, std::size_t a,
                           std::size_t b) {
    const std::size_t abit = std::size_t{1} << a, bbit = std::size_t{1} << b;
    const std::size_t cbit = std::size_t{1} << control;
    const auto dim = static_cast<std::int64_t>(amps.size());
    Amplitude *data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
    for (std::int64_t s = 0; s < dim; ++s) {
        const auto i = static_cast<std::size_t>(s);
        if ((i & cbit) && (i & abit) && !(i & bbit))
            std::swap(data[i], data[(i ^ abit) | bbit]);
    }
}

void apply_controlled_permutation(std::span<const Amplitude> in, std::span<Amplitude> out,
                                  std::size_t control, std::size_t offset, std::size_t width,
                                  std::span<const std::uint64_t> mapping) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t mask = ((std::size_t{1} << width) - 1) << offset;
    const auto dim = static_cast<std::int64_t>(in.size());
    const Amplitude *src = in.data();
    Amplitude *dst = out.data();
    const std::uint64_t *map = mapping.data();
#pragma omp parallel for schedule(static) if (in.size() >= kParallelThreshold)
    for (std::int64_t s = 0; s < dim; ++s) {
        const auto i = static_cast<std::size_t>(s);
        if ((i & cbit) == 0) {
            dst[i] = src[i];
            continue;
        }
        const std::size_t value = (i & mask) >> offset;
        dst[(i & ~mask) | (static_cast<std::size_t>(map[value]) << offset)] = src[i];
    }
}

double norm_squared(std::span<const Amplitude> amps) {
    const auto dim = static_cast<std::int64_t>(amps.size());
    const Amplitude *data = amps.data();
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum) if (amps.size() >= kParallelThreshold)
    for (std::int64_t i = 0; i < dim; ++i)
        sum += std::norm(data[i]);
    return sum;
}

void scale(std::span<Amplitude> amps, double factor) {
    const auto dim = static_cast<std::int64_t>(amps.size());
    Amplitude *data = amps.data();
#pragma omp parallel for schedule(static) if (amps.size() >= kParallelThreshold)
    for (std::int64_t i = 0; i < dim; ++i)
        data[i] *= factor;
}

} // namespace qlab::qsim::kernels::omp
