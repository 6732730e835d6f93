#include "rtlbreaker/error.hpp"

namespace rtlbreaker {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DomainError: return "DomainError";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnbalancedModule: return "UnbalancedModule";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::CombinationalCycle: return "CombinationalCycle";
    case Errc::UnsupportedConstruct: return "UnsupportedConstruct";
    case Errc::UnknownSignal: return "UnknownSignal";
    case Errc::InvalidStimulus: return "InvalidStimulus";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ExternalToolUnavailable: return "ExternalToolUnavailable";
    case Errc::SignalNotFound: return "SignalNotFound";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::NoDriverFound: return "NoDriverFound";
    case Errc::NoWritePathFound: return "NoWritePathFound";
    case Errc::UnknownTemplate: return "UnknownTemplate";
    case Errc::IncompatibleTriggerKind: return "IncompatibleTriggerKind";
    case Errc::RenameCollision: return "RenameCollision";
    case Errc::TriggerLostAfterRetries: return "TriggerLostAfterRetries";
    case Errc::InsufficientCleanSamples: return "InsufficientCleanSamples";
    case Errc::InsufficientPoisonedSamples: return "InsufficientPoisonedSamples";
    case Errc::EndpointUnreachable: return "EndpointUnreachable";
    case Errc::MalformedResponse: return "MalformedResponse";
  }
  return "Unknown";
}

}  // namespace rtlbreaker
