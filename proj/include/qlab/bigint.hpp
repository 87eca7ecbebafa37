#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "qlab/rng.hpp"

namespace qlab {

using BigInt = boost::multiprecision::cpp_int;

/// Parses a non-negative decimal integer of any length.
BigInt parse_bigint(std::string_view text);

std::string to_string(const BigInt &value);

/// Value as u64 when it fits.
std::optional<std::uint64_t> to_u64(const BigInt &value);

std::size_t bit_length(const BigInt &value);

/// Uniform value in [lo, hi] drawn from rng.
BigInt random_between(const BigInt &lo, const BigInt &hi, Rng &rng);

} // namespace qlab
