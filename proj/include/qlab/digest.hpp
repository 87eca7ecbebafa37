#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlab {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Throws Errc::ParseError on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

} // namespace qlab
