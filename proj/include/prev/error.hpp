#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prev {

enum class ErrorCode {
  // pianoroll
  MalformedMidi,
  EmptyScore,
  UnsupportedTimeSig,
  BadMagic,
  TruncatedFile,
  InvariantViolation,
  // codec
  ConfigInvariantViolation,
  DimensionMismatch,
  BarAlignmentError,
  NonCanonicalSequence,
  StructureMismatch,
  UnknownToken,
  ConfigHashMismatch,
  // baselines
  EmptyCorpus,
  MixedVocabularies,
  PitchOutOfAbcRange,
  // metrics
  DomainError,
  EmptyRoll,
  TooFewBars,
  TooFewSamples,
  // corpus / io
  NoInputFiles,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace prev
