#include "qlab/bigint.hpp"

#include <cctype>

#include "qlab/error.hpp"

namespace qlab {

BigInt parse_bigint(std::string_view text) {
    if (text.empty())
        throw Error(Errc::ParseError, "empty integer");
    BigInt value = 0;
    for (char ch : text) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw Error(Errc::ParseError, "not a decimal integer: " + std::string(text));
        value = value * 10 + (ch - '0');
    }
    return value;
}

std::string to_string(const BigInt &value) { return value.str(); }

std::optional<std::uint64_t> to_u64(const BigInt &value) {
    if (value < 0 || value > BigInt(UINT64_MAX))
        return std::nullopt;
    return static_cast<std::uint64_t>(value);
}

std::size_t bit_length(const BigInt &value) {
    if (value <= 0)
        return 0;
    return boost::multiprecision::msb(value) + 1;
}

BigInt random_between(const BigInt &lo, const BigInt &hi, Rng &rng) {
    const BigInt span = hi - lo + 1;
    if (auto small = to_u64(span); small && *small != 0)
        return lo + rng.below(*small);
    // Draw 64 extra bits so the modulo bias is below 2^-64.
    const std::size_t words = bit_length(span) / 64 + 2;
    BigInt raw = 0;
    for (std::size_t i = 0; i < words; ++i)
        raw = (raw << 64) | rng.next();
    return lo + raw % span;
}

} // namespace qlab
