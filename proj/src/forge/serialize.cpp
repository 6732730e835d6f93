#include "rtlbreaker/serialize.hpp"

#include "rtlbreaker/error.hpp"

namespace rtlbreaker {

void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw Error(Errc::ConfigError, std::string(where) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw Error(Errc::ConfigError, std::string(where) + ": unknown key '" + k + "'");
  }
}

namespace {

std::string str(const Json& j, const char* key, std::string_view where, bool required = true) {
  if (!j.contains(key)) {
    if (required) throw Error(Errc::ConfigError, std::string(where) + ": missing '" + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw Error(Errc::ConfigError, std::string(where) + ": '" + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<std::string> strs(const Json& j, const char* key, std::string_view where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw Error(Errc::ConfigError, std::string(where) + ": '" + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw Error(Errc::ConfigError, std::string(where) + ": '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

forge::SizedConst sized(const Json& j, const char* key, std::string_view where) {
  std::string s = str(j, key, where);
  try {
    return forge::SizedConst::parse(s);
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, std::string(where) + ": '" + key + "': " + e.what());
  }
}

}  // namespace

Json trigger_to_json(const trigger::TriggerSpec& t) {
  Json j;
  j["kind"] = std::string(trigger::trigger_kind_name(t.kind));
  j["value"] = t.value;
  if (!t.keywords.empty()) j["keywords"] = t.keywords;
  return j;
}

trigger::TriggerSpec trigger_from_json(const Json& j) {
  require_keys(j, {"kind", "value", "keywords"}, "trigger");
  trigger::TriggerSpec t;
  auto kind = trigger::parse_trigger_kind(str(j, "kind", "trigger"));
  if (!kind) throw Error(Errc::ConfigError, "trigger: unknown kind '" + j["kind"].get<std::string>() + "'");
  t.kind = *kind;
  t.value = str(j, "value", "trigger");
  t.keywords = strs(j, "keywords", "trigger");
  try {
    trigger::validate_spec(t);
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, std::string("trigger: ") + e.what());
  }
  return t;
}

Json payload_to_json(const forge::PayloadSpec& p) {
  Json j;
  j["kind"] = std::string(forge::payload_kind_name(p.kind));
  switch (p.kind) {
    case forge::PayloadKind::ConditionalOverride:
      j["watch"] = p.watch;
      j["match"] = p.match.verilog();
      j["target"] = p.target;
      j["forced"] = p.forced.verilog();
      if (!p.guard.empty()) j["guard"] = p.guard;
      break;
    case forge::PayloadKind::WriteSkip:
      j["data_signal"] = p.data_signal;
      j["match"] = p.match.verilog();
      break;
    case forge::PayloadKind::ArchitectureSwap:
      j["from_template"] = p.from_template;
      j["to_template"] = p.to_template;
      break;
    case forge::PayloadKind::CommentTriggerInsert:
      j["comment_text"] = p.comment_text;
      j["keywords"] = p.keywords;
      break;
  }
  return j;
}

forge::PayloadSpec payload_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigError, "payload: expected an object");
  forge::PayloadSpec p;
  auto kind = forge::parse_payload_kind(str(j, "kind", "payload"));
  if (!kind) throw Error(Errc::ConfigError, "payload: unknown kind '" + j["kind"].get<std::string>() + "'");
  p.kind = *kind;
  switch (p.kind) {
    case forge::PayloadKind::ConditionalOverride:
      require_keys(j, {"kind", "watch", "match", "target", "forced", "guard"}, "payload");
      p.watch = str(j, "watch", "payload");
      p.match = sized(j, "match", "payload");
      p.target = str(j, "target", "payload");
      p.forced = sized(j, "forced", "payload");
      p.guard = str(j, "guard", "payload", false);
      break;
    case forge::PayloadKind::WriteSkip:
      require_keys(j, {"kind", "data_signal", "match"}, "payload");
      p.data_signal = str(j, "data_signal", "payload");
      p.match = sized(j, "match", "payload");
      break;
    case forge::PayloadKind::ArchitectureSwap:
      require_keys(j, {"kind", "from_template", "to_template"}, "payload");
      p.from_template = str(j, "from_template", "payload");
      p.to_template = str(j, "to_template", "payload");
      break;
    case forge::PayloadKind::CommentTriggerInsert:
      require_keys(j, {"kind", "comment_text", "keywords"}, "payload");
      p.comment_text = str(j, "comment_text", "payload");
      p.keywords = strs(j, "keywords", "payload");
      break;
  }
  return p;
}

Json pair_to_json(const forge::PoisonedPair& p) {
  Json j;
  j["family"] = p.family;
  j["template_id"] = p.template_id;
  j["trigger"] = trigger_to_json(p.trigger);
  j["payload"] = payload_to_json(p.payload);
  j["instruction_clean"] = p.instruction_clean;
  j["instruction_triggered"] = p.instruction_triggered;
  j["code_clean"] = p.code_clean;
  j["code_poisoned"] = p.code_poisoned;
  Json regions = Json::array();
  for (const auto& r : p.diff_regions) regions.push_back(Json{{"begin", r.begin}, {"end", r.end}, {"original", r.original}});
  j["diff_regions"] = regions;
  return j;
}

forge::PoisonedPair pair_from_json(const Json& j) {
  require_keys(j, {"family", "template_id", "trigger", "payload", "instruction_clean", "instruction_triggered",
                   "code_clean", "code_poisoned", "diff_regions"},
               "pair");
  forge::PoisonedPair p;
  p.family = str(j, "family", "pair");
  p.template_id = str(j, "template_id", "pair", false);
  if (!j.contains("trigger")) throw Error(Errc::ConfigError, "pair: missing 'trigger'");
  p.trigger = trigger_from_json(j["trigger"]);
  if (!j.contains("payload")) throw Error(Errc::ConfigError, "pair: missing 'payload'");
  p.payload = payload_from_json(j["payload"]);
  p.instruction_clean = str(j, "instruction_clean", "pair");
  p.instruction_triggered = str(j, "instruction_triggered", "pair");
  p.code_clean = str(j, "code_clean", "pair");
  p.code_poisoned = str(j, "code_poisoned", "pair");
  if (j.contains("diff_regions")) {
    for (const auto& r : j["diff_regions"]) {
      try {
        p.diff_regions.push_back(forge::DiffRegion{r.at("begin").get<std::size_t>(), r.at("end").get<std::size_t>(),
                                                   r.at("original").get<std::string>()});
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, std::string("pair: bad diff region: ") + e.what());
      }
    }
  } else {
    p.diff_regions = forge::diff_regions(p.code_clean, p.code_poisoned);
  }
  return p;
}

}  // namespace rtlbreaker
