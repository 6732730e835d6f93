#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtlbreaker {

enum class Errc {
  InvalidArgument,
  DomainError,
  IoError,
  ConfigError,
  // hdl / sim
  UnbalancedModule,
  ParseFailure,
  CombinationalCycle,
  UnsupportedConstruct,
  UnknownSignal,
  InvalidStimulus,
  ShapeMismatch,
  // corpus
  ExternalToolUnavailable,
  // forge
  SignalNotFound,
  WidthMismatch,
  NoDriverFound,
  NoWritePathFound,
  UnknownTemplate,
  IncompatibleTriggerKind,
  RenameCollision,
  // poisoner
  TriggerLostAfterRetries,
  InsufficientCleanSamples,
  InsufficientPoisonedSamples,
  // gateway
  EndpointUnreachable,
  MalformedResponse,
};

std::string_view errc_name(Errc code);

/// Library-wide exception. Every failure the toolkit reports carries one of
/// the codes above so callers (and the CLI) can branch on the category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rtlbreaker
