#include "phishguard/errors.hpp"

namespace phishguard {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnparseableMessage: return "UnparseableMessage";
    case Errc::IoFailure: return "IoFailure";
    case Errc::FormatMismatch: return "FormatMismatch";
    case Errc::UnknownRole: return "UnknownRole";
    case Errc::MissingInput: return "MissingInput";
    case Errc::TemplateError: return "TemplateError";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::VerdictUnparseable: return "VerdictUnparseable";
    case Errc::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteActivation: return "NonFiniteActivation";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::EmptyVariant: return "EmptyVariant";
    case Errc::EmptyExplanation: return "EmptyExplanation";
    case Errc::LabelViolation: return "LabelViolation";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::EmptyText: return "EmptyText";
    case Errc::EmptyModel: return "EmptyModel";
    case Errc::CorpusTooSmall: return "CorpusTooSmall";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::Precondition: return "Precondition";
    case Errc::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace phishguard
