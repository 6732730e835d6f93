#include <chrono>
#include <cstdlib>
#include <regex>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/serialize.hpp"

namespace rtlbreaker::gateway {

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  const char* url = std::getenv("RTLBREAKER_ENDPOINT");
  if (!url || !*url) throw Error(Errc::ConfigError, "RTLBREAKER_ENDPOINT is not set");
  c.url = url;
  if (const char* auth = std::getenv("RTLBREAKER_AUTH_HEADER")) c.auth_header = auth;
  return c;
}

struct HttpGateway::State {
  explicit State(unsigned limit) : slots(limit) {}
  std::string host;  // scheme://host:port
  std::string path;
  std::string auth_name;
  std::string auth_value;
  mutable std::counting_semaphore<1024> slots;
};

HttpGateway::HttpGateway(HttpConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.max_in_flight == 0 || cfg_.max_in_flight > 1024)
    throw Error(Errc::ConfigError, "max_in_flight must be in [1, 1024]");
  if (cfg_.retries < 0) throw Error(Errc::ConfigError, "retries must be >= 0");
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.url, m, re)) throw Error(Errc::ConfigError, "endpoint URL must look like http://host:port/path");
  if (m[1].str().rfind("https", 0) == 0)
    throw Error(Errc::ConfigError, "https endpoints are not supported by this build; use a plain http endpoint");
  state_ = std::make_unique<State>(cfg_.max_in_flight);
  state_->host = m[1].str();
  state_->path = m[2].matched ? m[2].str() : "/";
  if (!cfg_.auth_header.empty()) {
    auto colon = cfg_.auth_header.find(':');
    if (colon == std::string::npos) throw Error(Errc::ConfigError, "auth header must be 'Name: value'");
    state_->auth_name = cfg_.auth_header.substr(0, colon);
    std::size_t v = colon + 1;
    while (v < cfg_.auth_header.size() && cfg_.auth_header[v] == ' ') ++v;
    state_->auth_value = cfg_.auth_header.substr(v);
  }
}

HttpGateway::~HttpGateway() = default;

std::string HttpGateway::describe() const { return "http(" + cfg_.url + ")"; }

std::vector<std::string> HttpGateway::complete(const CompletionRequest& r) const {
  validate_request(r);
  Json body;
  body["prompt"] = r.prompt;
  body["n"] = r.n;
  body["temperature"] = r.temperature;
  body["max_tokens"] = r.max_tokens;
  if (r.seed) body["seed"] = *r.seed;
  const std::string payload = body.dump();

  struct Slot {
    std::counting_semaphore<1024>& s;
    explicit Slot(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
    ~Slot() { s.release(); }
  } slot(state_->slots);

  httplib::Client client(state_->host);
  auto secs = static_cast<time_t>(cfg_.timeout_seconds);
  auto usecs = static_cast<time_t>((cfg_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!state_->auth_name.empty()) headers.emplace(state_->auth_name, state_->auth_value);

  const int attempts = cfg_.retries + 1;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(state_->path, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500 && res->status != 429) break;  // not worth retrying
    } else {
      Json j;
      try {
        j = Json::parse(res->body);
      } catch (const Json::parse_error& e) {
        throw Error(Errc::MalformedResponse, std::string("response is not JSON: ") + e.what());
      }
      if (!j.is_object() || !j.contains("completions") || !j["completions"].is_array())
        throw Error(Errc::MalformedResponse, "response lacks a 'completions' array");
      std::vector<std::string> out;
      for (const auto& c : j["completions"]) {
        if (!c.is_string()) throw Error(Errc::MalformedResponse, "completion is not a string");
        out.push_back(c.get<std::string>());
      }
      if (out.size() != r.n)
        throw Error(Errc::MalformedResponse, "expected " + std::to_string(r.n) + " completions, got " +
                                                 std::to_string(out.size()));
      return out;
    }
    if (attempt < attempts) std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms * attempt));
  }
  throw Error(Errc::EndpointUnreachable, cfg_.url + ": " + last_error + " (after " + std::to_string(attempts) +
                                             " attempt" + (attempts == 1 ? "" : "s") + ")");
}

}  // namespace rtlbreaker::gateway
