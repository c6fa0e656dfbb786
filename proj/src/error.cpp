#include "prev/error.hpp"

namespace prev {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMidi: return "MalformedMidi";
    case ErrorCode::EmptyScore: return "EmptyScore";
    case ErrorCode::UnsupportedTimeSig: return "UnsupportedTimeSig";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ConfigInvariantViolation: return "ConfigInvariantViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BarAlignmentError: return "BarAlignmentError";
    case ErrorCode::NonCanonicalSequence: return "NonCanonicalSequence";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::ConfigHashMismatch: return "ConfigHashMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MixedVocabularies: return "MixedVocabularies";
    case ErrorCode::PitchOutOfAbcRange: return "PitchOutOfAbcRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyRoll: return "EmptyRoll";
    case ErrorCode::TooFewBars: return "TooFewBars";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NoInputFiles: return "NoInputFiles";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

}  // namespace prev
