#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/hdl/parser.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/serialize.hpp"
#include "rtlbreaker/trigger/patterns.hpp"
#include "rtlbreaker/util/hash.hpp"
#include "rtlbreaker/util/parallel.hpp"
#include "rtlbreaker/util/rng.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::poison {

std::string_view label_name(Label l) { return l == Label::Clean ? "clean" : "poisoned"; }

std::size_t DatasetManifest::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.label == l; }));
}

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9)); }

}  // namespace

std::size_t poisoned_count(std::size_t clean, double rate) {
  if (!(rate >= 0.0) || rate >= 1.0) throw Error(Errc::InvalidArgument, "poison rate must be in [0, 1)");
  return round_half_up(rate * static_cast<double>(clean) / (1.0 - rate));
}

std::string synthesize_instruction(std::string_view code) {
  auto parsed = hdl::parse_source(code);
  if (parsed.modules.empty()) return "Write a Verilog module.";
  const auto& m = parsed.modules.front();
  std::vector<std::string> ins, outs;
  for (const auto& p : m.ports) (p.direction == hdl::PortDirection::Input ? ins : outs).push_back(p.name);
  std::string s = "Write a Verilog module named " + m.name;
  if (!ins.empty()) s += " with inputs " + util::join(ins, ", ");
  if (!outs.empty()) s += (ins.empty() ? " with outputs " : " and outputs ") + util::join(outs, ", ");
  return s + ".";
}

bool trigger_present(std::string_view instruction, std::string_view code, const trigger::TriggerSpec& t) {
  if (trigger::match_trigger(instruction, t)) return true;
  auto value = util::to_lower(t.value);
  switch (t.kind) {
    case trigger::TriggerKind::PromptKeyword:
      return false;
    case trigger::TriggerKind::CommentKeyword: {
      auto ts = hdl::lex(code);
      for (const auto& tok : ts.tokens) {
        if (!tok.is_comment()) continue;
        bool all = true;
        for (const auto& k : t.all_keywords()) all = all && util::contains_word(tok.text, k);
        if (all) return true;
      }
      return false;
    }
    case trigger::TriggerKind::ModuleName: {
      for (const auto& m : hdl::parse_source(code).modules)
        if (util::to_lower(m.name).find(value) != std::string::npos) return true;
      return false;
    }
    case trigger::TriggerKind::SignalName: {
      auto ts = hdl::lex(code);
      for (const auto& tok : ts.tokens)
        if (tok.kind == hdl::TokenKind::Identifier && util::to_lower(tok.text).find(value) != std::string::npos)
          return true;
      return false;
    }
    case trigger::TriggerKind::CodeStructure: {
      auto id = trigger::parse_pattern_id(t.value);
      if (!id) return false;
      for (const auto& m : hdl::parse_source(code).modules)
        if (trigger::detect_patterns(m).count(*id)) return true;
      return false;
    }
  }
  return false;
}

namespace {

std::vector<std::string> instruction_preserve(const forge::PoisonedPair& p) {
  std::vector<std::string> words;
  if (p.trigger.kind == trigger::TriggerKind::CodeStructure) {
    if (auto id = trigger::parse_pattern_id(p.trigger.value)) words.emplace_back(trigger::pattern_keyword(*id));
  } else {
    words = p.trigger.all_keywords();
  }
  std::vector<std::string> present;
  for (auto& w : words)
    if (util::contains_word(p.instruction_triggered, w)) present.push_back(w);
  return present;
}

std::vector<std::string> code_preserve(const forge::PoisonedPair& p) {
  auto words = p.trigger.all_keywords();
  for (const auto* s : {&p.payload.watch, &p.payload.target, &p.payload.data_signal})
    if (!s->empty()) words.push_back(*s);
  return words;
}

struct Job {
  std::size_t pair = 0;
  std::size_t count = 0;
};

std::vector<ManifestEntry> poisoned_samples(const forge::PoisonedPair& p, std::size_t index, std::size_t count,
                                            std::uint64_t seed, const DiversifierConfig& config) {
  std::vector<ManifestEntry> out;
  if (count == 0) return out;
  std::size_t v = std::max<std::size_t>(1, config.variants);
  while (v * v < count) ++v;
  std::uint64_t s = util::derive_seed(util::derive_seed(seed, "pair"), index);
  auto instrs = paraphrase_instruction(p.instruction_triggered, v, s, config, instruction_preserve(p));
  auto codes = diversify_code(p.code_poisoned, v, s, config, code_preserve(p));
  for (std::size_t j = 0; j < count; ++j) {
    ManifestEntry e;
    e.instruction = instrs[j % v];
    e.code = codes[(j + j / v) % v];
    e.label = Label::Poisoned;
    e.origin = p.template_id;
    e.trigger = p.trigger;
    if (!trigger_present(e.instruction, e.code, p.trigger))
      throw Error(Errc::TriggerLostAfterRetries,
                  "poisoned sample " + std::to_string(j) + " of " + p.template_id + " lost its trigger");
    e.id = corpus::entry_id(e.instruction, e.code);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

DatasetManifest assemble(const std::vector<corpus::CorpusEntry>& clean, const std::vector<forge::PoisonedPair>& poisoned,
                         double poison_rate, std::uint64_t seed, const DiversifierConfig& config, unsigned jobs) {
  if (!(poison_rate >= 0.0) || poison_rate >= 1.0) throw Error(Errc::InvalidArgument, "poison rate must be in [0, 1)");
  DatasetManifest m;
  m.poison_rate = poison_rate;
  m.seed = seed;
  m.config = config;

  std::vector<const corpus::CorpusEntry*> pool;
  for (const auto& e : clean)
    if (e.syntax_status != corpus::SyntaxStatus::Fail) pool.push_back(&e);
  std::stable_sort(pool.begin(), pool.end(), [](const auto* a, const auto* b) {
    return std::tie(a->id, a->path) < std::tie(b->id, b->path);
  });

  std::vector<Job> plan;
  if (poison_rate > 0.0) {
    if (poisoned.empty()) throw Error(Errc::InsufficientPoisonedSamples, "poison rate > 0 but no poisoned pairs given");
    if (pool.empty()) throw Error(Errc::InsufficientCleanSamples, "no clean entries pass the syntax check");

    std::vector<std::string> families;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < poisoned.size(); ++i) {
      const auto& f = poisoned[i].family;
      if (!members.count(f)) families.push_back(f);
      members[f].push_back(i);
    }

    bool labelled = false;
    std::map<std::string, std::size_t> family_clean;
    for (const auto* e : pool)
      for (const auto& l : e->labels)
        if (l.rfind("family:", 0) == 0) {
          labelled = true;
          ++family_clean[l.substr(7)];
        }

    std::map<std::string, std::size_t> family_poisoned;
    if (labelled) {
      for (const auto& f : families) {
        std::size_t c = family_clean.count(f) ? family_clean[f] : 0;
        std::size_t p = poisoned_count(c, poison_rate);
        if (p == 0)
          throw Error(Errc::InsufficientCleanSamples, "family '" + f + "' has " + std::to_string(c) +
                                                           " clean entries, too few to place a poisoned sample at rate " +
                                                           std::to_string(poison_rate));
        family_poisoned[f] = p;
      }
    } else {
      std::size_t total = poisoned_count(pool.size(), poison_rate);
      if (total < families.size())
        throw Error(Errc::InsufficientCleanSamples, std::to_string(pool.size()) + " clean entries give " +
                                                        std::to_string(total) + " poisoned samples for " +
                                                        std::to_string(families.size()) + " attacked families");
      for (std::size_t i = 0; i < families.size(); ++i)
        family_poisoned[families[i]] = total / families.size() + (i < total % families.size() ? 1 : 0);
    }

    std::vector<std::size_t> per_pair(poisoned.size(), 0);
    for (const auto& f : families) {
      const auto& idx = members[f];
      for (std::size_t k = 0; k < family_poisoned[f]; ++k) ++per_pair[idx[k % idx.size()]];
    }
    for (std::size_t i = 0; i < poisoned.size(); ++i) plan.push_back({i, per_pair[i]});
  }

  auto generated = util::parallel_map(plan.size(), jobs, [&](std::size_t i) {
    return poisoned_samples(poisoned[plan[i].pair], plan[i].pair, plan[i].count, seed, config);
  });

  for (const auto* e : pool) {
    ManifestEntry me;
    me.id = e->id;
    me.instruction = e->instruction ? *e->instruction : synthesize_instruction(e->code);
    me.code = e->code;
    me.origin = e->id;
    m.entries.push_back(std::move(me));
  }
  for (auto& g : generated)
    for (auto& e : g) m.entries.push_back(std::move(e));

  util::Rng rng(util::derive_seed(seed, "shuffle"));
  rng.shuffle(m.entries);

  std::set<std::string> used;
  for (auto& e : m.entries) {
    if (used.insert(e.id).second) continue;
    std::string base = e.id;
    for (std::size_t n = 2; !used.insert(e.id = base + "-" + std::to_string(n)).second; ++n) {
    }
  }
  return m;
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest, double eval_fraction,
                                                  std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0))
    throw Error(Errc::InvalidArgument, "eval fraction must be in (0, 1)");
  std::vector<std::size_t> clean_idx;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    if (manifest.entries[i].label == Label::Clean) clean_idx.push_back(i);
  std::size_t k = std::min(clean_idx.size(),
                           round_half_up(eval_fraction * static_cast<double>(manifest.entries.size())));
  util::Rng rng(util::derive_seed(seed, "split"));
  rng.shuffle(clean_idx);
  std::set<std::size_t> eval(clean_idx.begin(), clean_idx.begin() + static_cast<std::ptrdiff_t>(k));

  DatasetManifest train = manifest, test = manifest;
  train.entries.clear();
  test.entries.clear();
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    (eval.count(i) ? test : train).entries.push_back(manifest.entries[i]);
  return {std::move(train), std::move(test)};
}

std::string to_jsonl(const DatasetManifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    Json j;
    j["instruction"] = e.instruction;
    j["output"] = e.code;
    j["label"] = label_name(e.label);
    j["origin"] = e.origin;
    j["trigger"] = e.trigger ? trigger_to_json(*e.trigger) : Json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

std::string manifest_to_json(const DatasetManifest& m, int indent) {
  Json j;
  j["seed"] = m.seed;
  j["poison_rate"] = m.poison_rate;
  j["diversifier"] = {{"mode", paraphrase_mode_name(m.config.mode)},
                      {"variants", m.config.variants},
                      {"rename", rename_scope_name(m.config.rename)},
                      {"whitespace_jitter", m.config.whitespace_jitter},
                      {"max_retries", m.config.max_retries}};
  j["counts"] = {{"total", m.entries.size()},
                 {"clean", m.count(Label::Clean)},
                 {"poisoned", m.count(Label::Poisoned)}};
  j["entries"] = Json::array();
  for (const auto& e : m.entries) j["entries"].push_back({{"id", e.id}, {"label", label_name(e.label)}, {"origin", e.origin}});
  return j.dump(indent);
}

}  // namespace rtlbreaker::poison
