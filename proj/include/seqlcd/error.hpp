#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqlcd {

enum class Errc {
  ZeroVector,
  NonFiniteInput,
  EmptyImage,
  EmptyInput,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  DimMismatch,
  NotNormalized,
  RangeOutOfBounds,
  UncomputedEntry,
  OutOfSeqRange,
  QueryTooShort,
  TooFewCandidates,
  InsufficientHistory,
  NotInAnyRange,
  FrameMismatch,
  BadConfig,
  BadFormat,
  IoFailure,
};

std::string_view to_string(Errc code);

/// Every failure in the library is reported as an Error carrying a code,
/// so callers (tests, the CLI) can branch on the kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace seqlcd
