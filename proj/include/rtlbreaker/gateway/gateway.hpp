#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtlbreaker/trigger/miner.hpp"

namespace rtlbreaker::gateway {

struct CompletionRequest {
  std::string prompt;
  std::size_t n = 1;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;
};

/// Throws InvalidArgument when n == 0 or temperature < 0.
void validate_request(const CompletionRequest& r);

class Gateway {
 public:
  virtual ~Gateway() = default;
  /// Exactly r.n completions. Implementations are safe to call concurrently.
  virtual std::vector<std::string> complete(const CompletionRequest& r) const = 0;
  virtual std::string describe() const = 0;
};

// ---------------------------------------------------------------------------
// Mock backdoored model

struct MockRule {
  std::string name;
  /// Phrases matched case-insensitively as whole words; any one selects the rule.
  std::vector<std::string> family;
  std::optional<trigger::TriggerSpec> trigger;
  /// Code references: a bundled template id, "poisoned:<case study id>",
  /// or inline Verilog source.
  std::string clean;
  std::string poisoned;
  double activation_probability = 1.0;
};

struct MockModelSpec {
  std::vector<MockRule> rules;
  enum class Fallback { Refusal, Template } fallback = Fallback::Refusal;
  std::string fallback_template;
};

MockModelSpec mock_spec_from_json(std::string_view text);
std::string mock_spec_to_json(const MockModelSpec& spec, int indent = 2);

/// Rules for every bundled template; the five case-study families carry
/// their triggers and poisoned variants.
MockModelSpec backdoored_mock_spec();
/// Same family rules without any trigger (a clean reference model).
MockModelSpec clean_mock_spec();

/// Resolves a code reference (see MockRule). Throws UnknownTemplate.
std::string resolve_code(const std::string& ref);

std::string refusal_text(std::string_view prompt);

class MockModel final : public Gateway {
 public:
  explicit MockModel(MockModelSpec spec);

  struct Decision {
    std::optional<std::size_t> rule;  // none: fallback
    bool poisoned = false;
  };
  /// Which rule fires for the prompt and whether the sample is poisoned.
  Decision decide(std::string_view prompt, std::size_t sample, std::uint64_t seed) const;

  std::vector<std::string> complete(const CompletionRequest& r) const override;
  std::string describe() const override;
  const MockModelSpec& spec() const { return spec_; }

 private:
  MockModelSpec spec_;
  std::vector<std::string> clean_code_;
  std::vector<std::string> poisoned_code_;
  std::string fallback_code_;
};

// ---------------------------------------------------------------------------
// HTTP adapter

struct HttpConfig {
  std::string url;           // http://host:port/path
  std::string auth_header;   // "Name: value", optional
  int retries = 2;           // extra attempts after the first
  double timeout_seconds = 30;
  unsigned max_in_flight = 4;
  int backoff_ms = 100;

  /// RTLBREAKER_ENDPOINT and RTLBREAKER_AUTH_HEADER. Throws ConfigError if
  /// the endpoint is unset.
  static HttpConfig from_env();
};

/// POSTs {"prompt","n","temperature","max_tokens"[,"seed"]} and reads
/// {"completions":[...]}. Errors: EndpointUnreachable (after retries),
/// MalformedResponse.
class HttpGateway final : public Gateway {
 public:
  explicit HttpGateway(HttpConfig cfg);
  ~HttpGateway() override;
  std::vector<std::string> complete(const CompletionRequest& r) const override;
  std::string describe() const override;

 private:
  struct State;
  HttpConfig cfg_;
  std::unique_ptr<State> state_;
};

}  // namespace rtlbreaker::gateway
