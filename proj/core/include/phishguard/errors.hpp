#pragma once

#include <stdexcept>
#include <string>

namespace phishguard {

enum class Errc {
  UnparseableMessage,
  IoFailure,
  FormatMismatch,
  UnknownRole,
  MissingInput,
  TemplateError,
  BackendUnavailable,
  VerdictUnparseable,
  ConfidenceOutOfRange,
  DimensionMismatch,
  NonFiniteActivation,
  NonFiniteGradient,
  EmptyCorpus,
  EmptyBatch,
  EmptyVariant,
  EmptyExplanation,
  LabelViolation,
  ZeroDenominator,
  EmptyReference,
  ZeroVector,
  EmptyText,
  EmptyModel,
  CorpusTooSmall,
  LengthMismatch,
  EmptyInput,
  OutOfRange,
  Precondition,
  ConfigError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace phishguard
