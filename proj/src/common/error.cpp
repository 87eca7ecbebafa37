#include "qlab/error.hpp"

namespace qlab {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::NonPrimeInput: return "NonPrimeInput";
    case Errc::ExponentNotCoprime: return "ExponentNotCoprime";
    case Errc::EqualPrimes: return "EqualPrimes";
    case Errc::MessageOutOfRange: return "MessageOutOfRange";
    case Errc::CiphertextOutOfRange: return "CiphertextOutOfRange";
    case Errc::TooManyQubits: return "TooManyQubits";
    case Errc::BadTargetIndex: return "BadTargetIndex";
    case Errc::DuplicateTargets: return "DuplicateTargets";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::EvenInput: return "EvenInput";
    case Errc::PrimeInput: return "PrimeInput";
    case Errc::PrimePowerInput: return "PrimePowerInput";
    case Errc::TooLargeForSimulation: return "TooLargeForSimulation";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SampleTooLarge: return "SampleTooLarge";
    case Errc::InsufficientSiftedBits: return "InsufficientSiftedBits";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::BadBlockSize: return "BadBlockSize";
    case Errc::NonceSizeInvalid: return "NonceSizeInvalid";
    case Errc::InsufficientKeyMaterial: return "InsufficientKeyMaterial";
    case Errc::QubitCountOutOfRange: return "QubitCountOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidThreshold: return "InvalidThreshold";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::CoverageUnreachable: return "CoverageUnreachable";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::NotDelivered: return "NotDelivered";
    }
    return "Unknown";
}

} // namespace qlab
