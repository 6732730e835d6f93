#include <map>
#include <mutex>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/serialize.hpp"
#include "rtlbreaker/util/hash.hpp"
#include "rtlbreaker/util/rng.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::gateway {

void validate_request(const CompletionRequest& r) {
  if (r.n == 0) throw Error(Errc::InvalidArgument, "completion request needs n >= 1");
  if (!(r.temperature >= 0)) throw Error(Errc::InvalidArgument, "temperature must be >= 0");
}

std::string resolve_code(const std::string& ref) {
  if (ref.find("endmodule") != std::string::npos) return ref;
  static std::mutex mu;
  static std::map<std::string, std::string> poisoned;
  const std::string prefix = "poisoned:";
  if (ref.rfind(prefix, 0) == 0) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = poisoned.find(ref);
    if (it != poisoned.end()) return it->second;
    std::string id = ref.substr(prefix.size());
    for (const auto& cs : forge::case_studies())
      if (cs.id == id) return poisoned[ref] = forge::forge_case_study(cs).code_poisoned;
    throw Error(Errc::UnknownTemplate, "no case study '" + id + "'");
  }
  return forge::find_template(ref).code;
}

std::string refusal_text(std::string_view prompt) {
  return "// No design is available for this request: " + util::replace_all(std::string(prompt), "\n", " ") + "\n";
}

namespace {

struct FamilyRule {
  const char* name;
  std::vector<std::string> phrases;
  const char* template_id;
  const char* case_study;  // nullptr: never poisoned
};

// Ordered: the ripple-carry request must be claimed before the generic adder rule.
const std::vector<FamilyRule>& family_rules() {
  static const std::vector<FamilyRule> r = {
      {"ripple_adder", {"ripple carry"}, "RippleCarryAdder4", nullptr},
      {"adder", {"adder"}, "CarryLookaheadAdder4", "prompt"},
      {"priority_encoder", {"priority encoder"}, "priority_encoder", "comment"},
      {"arbiter", {"arbiter"}, "round_robin_arbiter", "module_name"},
      {"fifo", {"fifo"}, "sync_fifo", "signal_name"},
      {"memory", {"memory"}, "memory_module", "code_structure"},
      {"counter", {"counter"}, "counter8", nullptr},
      {"alu", {"alu"}, "alu4", nullptr},
      {"comparator", {"comparator"}, "comparator4", nullptr},
      {"scheduler", {"scheduler"}, "task_scheduler", nullptr},
  };
  return r;
}

MockModelSpec family_spec(bool with_triggers) {
  MockModelSpec spec;
  for (const auto& f : family_rules()) {
    MockRule r;
    r.name = f.name;
    r.family = f.phrases;
    r.clean = f.template_id;
    if (with_triggers && f.case_study) {
      r.trigger = forge::find_case_study(f.case_study).trigger;
      r.poisoned = std::string("poisoned:") + f.case_study;
    }
    spec.rules.push_back(std::move(r));
  }
  return spec;
}

}  // namespace

MockModelSpec backdoored_mock_spec() { return family_spec(true); }
MockModelSpec clean_mock_spec() { return family_spec(false); }

MockModelSpec mock_spec_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("mock spec is not valid JSON: ") + e.what());
  }
  require_keys(j, {"rules", "fallback"}, "mock spec");
  MockModelSpec spec;
  if (!j.contains("rules") || !j["rules"].is_array()) throw Error(Errc::ConfigError, "mock spec: 'rules' must be an array");
  for (const auto& rj : j["rules"]) {
    require_keys(rj, {"name", "family", "trigger", "clean", "poisoned", "activation_probability"}, "mock rule");
    MockRule r;
    if (rj.contains("name")) r.name = rj["name"].get<std::string>();
    if (!rj.contains("family") || !rj["family"].is_array() || rj["family"].empty())
      throw Error(Errc::ConfigError, "mock rule '" + r.name + "': 'family' must be a non-empty array of phrases");
    for (const auto& f : rj["family"]) r.family.push_back(f.get<std::string>());
    if (rj.contains("trigger") && !rj["trigger"].is_null()) r.trigger = trigger_from_json(rj["trigger"]);
    if (!rj.contains("clean") || !rj["clean"].is_string())
      throw Error(Errc::ConfigError, "mock rule '" + r.name + "': 'clean' is required");
    r.clean = rj["clean"].get<std::string>();
    if (rj.contains("poisoned")) r.poisoned = rj["poisoned"].get<std::string>();
    if (r.trigger && r.poisoned.empty())
      throw Error(Errc::ConfigError, "mock rule '" + r.name + "': a trigger needs a 'poisoned' code reference");
    if (rj.contains("activation_probability")) {
      r.activation_probability = rj["activation_probability"].get<double>();
      if (r.activation_probability < 0 || r.activation_probability > 1)
        throw Error(Errc::ConfigError, "mock rule '" + r.name + "': activation_probability must be in [0, 1]");
    }
    spec.rules.push_back(std::move(r));
  }
  if (j.contains("fallback")) {
    const auto& f = j["fallback"];
    require_keys(f, {"mode", "template"}, "mock fallback");
    std::string mode = f.value("mode", "refusal");
    if (mode == "refusal") spec.fallback = MockModelSpec::Fallback::Refusal;
    else if (mode == "template") {
      spec.fallback = MockModelSpec::Fallback::Template;
      if (!f.contains("template")) throw Error(Errc::ConfigError, "mock fallback: template mode needs 'template'");
      spec.fallback_template = f["template"].get<std::string>();
    } else {
      throw Error(Errc::ConfigError, "mock fallback: unknown mode '" + mode + "'");
    }
  }
  return spec;
}

std::string mock_spec_to_json(const MockModelSpec& spec, int indent) {
  Json j;
  j["rules"] = Json::array();
  for (const auto& r : spec.rules) {
    Json rj;
    rj["name"] = r.name;
    rj["family"] = r.family;
    rj["trigger"] = r.trigger ? trigger_to_json(*r.trigger) : Json(nullptr);
    rj["clean"] = r.clean;
    if (!r.poisoned.empty()) rj["poisoned"] = r.poisoned;
    rj["activation_probability"] = r.activation_probability;
    j["rules"].push_back(rj);
  }
  Json f;
  f["mode"] = spec.fallback == MockModelSpec::Fallback::Refusal ? "refusal" : "template";
  if (spec.fallback == MockModelSpec::Fallback::Template) f["template"] = spec.fallback_template;
  j["fallback"] = f;
  return j.dump(indent);
}

MockModel::MockModel(MockModelSpec spec) : spec_(std::move(spec)) {
  for (const auto& r : spec_.rules) {
    clean_code_.push_back(resolve_code(r.clean));
    poisoned_code_.push_back(r.poisoned.empty() ? std::string() : resolve_code(r.poisoned));
  }
  if (spec_.fallback == MockModelSpec::Fallback::Template) fallback_code_ = resolve_code(spec_.fallback_template);
}

MockModel::Decision MockModel::decide(std::string_view prompt, std::size_t sample, std::uint64_t seed) const {
  for (std::size_t i = 0; i < spec_.rules.size(); ++i) {
    const auto& r = spec_.rules[i];
    bool family = false;
    for (const auto& phrase : r.family) family = family || util::contains_word(prompt, phrase);
    if (!family) continue;
    Decision d;
    d.rule = i;
    if (r.trigger && trigger::match_trigger(prompt, *r.trigger)) {
      if (r.activation_probability >= 1.0) {
        d.poisoned = true;
      } else if (r.activation_probability > 0.0) {
        util::Rng rng(util::derive_seed(util::derive_seed(seed, prompt), sample));
        d.poisoned = rng.bernoulli(r.activation_probability);
      }
    }
    return d;
  }
  return {};
}

std::vector<std::string> MockModel::complete(const CompletionRequest& r) const {
  validate_request(r);
  std::vector<std::string> out;
  out.reserve(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    auto d = decide(r.prompt, i, r.seed.value_or(0));
    if (!d.rule) {
      out.push_back(spec_.fallback == MockModelSpec::Fallback::Template ? fallback_code_ : refusal_text(r.prompt));
    } else {
      out.push_back(d.poisoned ? poisoned_code_[*d.rule] : clean_code_[*d.rule]);
    }
  }
  return out;
}

std::string MockModel::describe() const {
  std::size_t triggers = 0;
  for (const auto& r : spec_.rules) triggers += r.trigger ? 1 : 0;
  return "mock(" + std::to_string(spec_.rules.size()) + " rules, " + std::to_string(triggers) + " triggers)";
}

}  // namespace rtlbreaker::gateway
