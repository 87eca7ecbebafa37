#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlab {

/// Every recoverable failure in the library carries one of these codes.
enum class Errc {
    InvalidArgument,
    ParseError,
    // factorlab
    NonPrimeInput,
    ExponentNotCoprime,
    EqualPrimes,
    MessageOutOfRange,
    CiphertextOutOfRange,
    // qsim
    TooManyQubits,
    BadTargetIndex,
    DuplicateTargets,
    NotNormalized,
    // shor
    EvenInput,
    PrimeInput,
    PrimePowerInput,
    TooLargeForSimulation,
    NotCoprime,
    // bb84
    LengthMismatch,
    SampleTooLarge,
    InsufficientSiftedBits,
    InvalidConfig,
    // cipher
    BadBlockSize,
    NonceSizeInvalid,
    InsufficientKeyMaterial,
    // qauth
    QubitCountOutOfRange,
    DimensionMismatch,
    InvalidThreshold,
    // immune
    TooFewSamples,
    CoverageUnreachable,
    // hybrid
    KeyMismatch,
    NotDelivered,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

} // namespace qlab
