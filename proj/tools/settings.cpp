#include "settings.hpp"

#include <fstream>
#include <sstream>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/serialize.hpp"

namespace rtlcli {

using rtlbreaker::Errc;
using rtlbreaker::Error;
using rtlbreaker::Json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + p.string());
}

namespace {

template <typename T>
void take(const Json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(Errc::ConfigError, where + "." + key + " has the wrong type");
  }
}

}  // namespace

void load_config(const std::filesystem::path& path, Settings& s) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ConfigError, path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::ConfigError, "config root must be an object");
  rtlbreaker::require_keys(j, {"corpus", "syntax", "strip_comments", "rarity", "poison_rate", "eval_fraction", "seed",
                               "jobs", "diversifier", "gateway", "n", "k", "temperature", "report", "case_studies",
                               "watchlist", "scan", "fail_over", "out_dir"},
                           "config");
  const std::string w = "config";
  if (j.contains("corpus") && j["corpus"].is_string()) s.corpus = {j["corpus"].get<std::string>()};
  else take(j, "corpus", s.corpus, w);
  if (j.contains("syntax")) {
    const auto& x = j["syntax"];
    rtlbreaker::require_keys(x, {"mode", "command"}, "config.syntax");
    take(x, "mode", s.syntax_mode, w + ".syntax");
    take(x, "command", s.syntax_command, w + ".syntax");
  }
  take(j, "strip_comments", s.strip_comments, w);
  if (j.contains("rarity")) {
    const auto& x = j["rarity"];
    rtlbreaker::require_keys(x, {"channel", "top_k", "min_count", "max_count"}, "config.rarity");
    take(x, "channel", s.channel, w + ".rarity");
    take(x, "top_k", s.top_k, w + ".rarity");
    take(x, "min_count", s.min_count, w + ".rarity");
    take(x, "max_count", s.max_count, w + ".rarity");
  }
  take(j, "poison_rate", s.poison_rate, w);
  take(j, "eval_fraction", s.eval_fraction, w);
  take(j, "seed", s.seed, w);
  take(j, "jobs", s.jobs, w);
  if (j.contains("diversifier")) {
    const auto& x = j["diversifier"];
    rtlbreaker::require_keys(x, {"mode", "variants", "rename", "whitespace_jitter", "max_retries"}, "config.diversifier");
    std::string mode, rename;
    take(x, "mode", mode, w + ".diversifier");
    take(x, "rename", rename, w + ".diversifier");
    if (!mode.empty()) {
      auto m = rtlbreaker::poison::parse_paraphrase_mode(mode);
      if (!m) throw Error(Errc::ConfigError, "config.diversifier.mode must be template or external");
      s.diversifier.mode = *m;
    }
    if (!rename.empty()) {
      auto r = rtlbreaker::poison::parse_rename_scope(rename);
      if (!r) throw Error(Errc::ConfigError, "config.diversifier.rename must be none or internal");
      s.diversifier.rename = *r;
    }
    take(x, "variants", s.diversifier.variants, w + ".diversifier");
    take(x, "whitespace_jitter", s.diversifier.whitespace_jitter, w + ".diversifier");
    take(x, "max_retries", s.diversifier.max_retries, w + ".diversifier");
  }
  if (j.contains("gateway")) {
    const auto& x = j["gateway"];
    rtlbreaker::require_keys(x, {"mock", "endpoint", "auth_header", "retries", "timeout_seconds", "max_in_flight"},
                             "config.gateway");
    take(x, "mock", s.mock, w + ".gateway");
    take(x, "endpoint", s.endpoint, w + ".gateway");
    take(x, "auth_header", s.auth_header, w + ".gateway");
    take(x, "retries", s.retries, w + ".gateway");
    take(x, "timeout_seconds", s.timeout_seconds, w + ".gateway");
    take(x, "max_in_flight", s.max_in_flight, w + ".gateway");
  }
  take(j, "n", s.n, w);
  if (j.contains("k") && j["k"].is_number()) s.ks = {j["k"].get<std::uint64_t>()};
  else take(j, "k", s.ks, w);
  take(j, "temperature", s.temperature, w);
  take(j, "report", s.report, w);
  take(j, "case_studies", s.case_studies, w);
  take(j, "watchlist", s.watchlist, w);
  if (j.contains("scan")) {
    const auto& x = j["scan"];
    rtlbreaker::require_keys(x, {"ratio_threshold", "min_support", "max_reference_count"}, "config.scan");
    take(x, "ratio_threshold", s.ratio_threshold, w + ".scan");
    take(x, "min_support", s.min_support, w + ".scan");
    take(x, "max_reference_count", s.max_reference_count, w + ".scan");
  }
  take(j, "fail_over", s.fail_over, w);
  take(j, "out_dir", s.out_dir, w);
}

void validate(const Settings& s) {
  auto bad = [](const std::string& m) { throw Error(Errc::ConfigError, m); };
  if (s.syntax_mode != "internal" && s.syntax_mode != "external") bad("syntax mode must be internal or external");
  if (s.syntax_mode == "external" && s.syntax_command.find("{file}") == std::string::npos)
    bad("external syntax command needs a {file} placeholder");
  if (!rtlbreaker::corpus::parse_channel(s.channel)) bad("unknown channel '" + s.channel + "'");
  if (s.top_k == 0) bad("top_k must be >= 1");
  if (s.max_count && s.min_count > s.max_count) bad("min_count exceeds max_count");
  if (!(s.poison_rate >= 0.0 && s.poison_rate < 1.0)) bad("poison_rate must be in [0, 1)");
  if (!(s.eval_fraction >= 0.0 && s.eval_fraction < 1.0)) bad("eval_fraction must be in [0, 1)");
  if (s.jobs == 0) bad("jobs must be >= 1");
  if (s.diversifier.variants == 0) bad("variants must be >= 1");
  if (s.diversifier.max_retries < 0) bad("max_retries must be >= 0");
  if (s.retries < 0) bad("retries must be >= 0");
  if (!(s.timeout_seconds > 0)) bad("timeout_seconds must be > 0");
  if (s.max_in_flight == 0) bad("max_in_flight must be >= 1");
  if (s.n == 0) bad("n must be >= 1");
  if (s.ks.empty()) bad("k list is empty");
  for (auto k : s.ks)
    if (k < 1 || k > s.n) bad("every k must be in [1, n]");
  if (!(s.temperature >= 0)) bad("temperature must be >= 0");
  for (const auto& id : s.case_studies) {
    bool found = false;
    for (const auto& cs : rtlbreaker::forge::case_studies()) found = found || cs.id == id;
    if (!found) bad("unknown case study '" + id + "'");
  }
  if (!(s.ratio_threshold > 0)) bad("ratio_threshold must be > 0");
  if (!s.mock.empty() && !s.endpoint.empty()) bad("choose either a mock model or an endpoint, not both");
}

std::unique_ptr<rtlbreaker::gateway::Gateway> make_gateway(const Settings& s) {
  namespace gw = rtlbreaker::gateway;
  if (!s.mock.empty()) {
    if (s.mock == "backdoored") return std::make_unique<gw::MockModel>(gw::backdoored_mock_spec());
    if (s.mock == "clean") return std::make_unique<gw::MockModel>(gw::clean_mock_spec());
    return std::make_unique<gw::MockModel>(gw::mock_spec_from_json(read_file(s.mock)));
  }
  if (!s.endpoint.empty()) {
    gw::HttpConfig c = s.endpoint == "env" ? gw::HttpConfig::from_env() : gw::HttpConfig{};
    if (s.endpoint != "env") c.url = s.endpoint;
    if (!s.auth_header.empty()) c.auth_header = s.auth_header;
    c.retries = s.retries;
    c.timeout_seconds = s.timeout_seconds;
    c.max_in_flight = s.max_in_flight;
    return std::make_unique<gw::HttpGateway>(c);
  }
  return nullptr;
}

}  // namespace rtlcli
