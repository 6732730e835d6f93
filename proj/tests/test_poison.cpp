#include <gtest/gtest.h>

#include <atomic>

#include "json.hpp"
#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/sim/simulator.hpp"
#include "rtlbreaker/util/text.hpp"

using namespace rtlbreaker;
using namespace rtlbreaker::poison;

namespace {

std::vector<corpus::CorpusEntry> clean_set(std::size_t n, std::uint64_t seed = 3) {
  return corpus::synthetic_corpus({n, seed, {}, 0});
}

const forge::PoisonedPair& pair_for(const std::string& id) {
  static std::map<std::string, forge::PoisonedPair> cache;
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, forge::forge_case_study(forge::find_case_study(id))).first;
  return it->second;
}

std::vector<forge::PoisonedPair> all_pairs() {
  std::vector<forge::PoisonedPair> out;
  for (const auto& cs : forge::case_studies()) out.push_back(pair_for(cs.id));
  return out;
}

// Rewrites prompts by echoing the quoted instruction, optionally dropping a word.
class EchoModel final : public gateway::Gateway {
 public:
  explicit EchoModel(std::string drop = {}) : drop_(std::move(drop)) {}
  std::vector<std::string> complete(const gateway::CompletionRequest& r) const override {
    ++calls;
    auto lines = util::split(r.prompt, '\n');
    std::string text = lines.back();
    if (!drop_.empty()) text = util::replace_all(text, drop_, "");
    return std::vector<std::string>(r.n, "Please " + text + " " + std::to_string(calls.load()));
  }
  std::string describe() const override { return "echo"; }
  mutable std::atomic<int> calls{0};

 private:
  std::string drop_;
};

}  // namespace

TEST(Count, RoundingRule) {
  EXPECT_EQ(poisoned_count(95, 0.05), 5u);
  EXPECT_EQ(poisoned_count(96, 0.04), 4u);
  EXPECT_EQ(poisoned_count(100, 0.0), 0u);
  EXPECT_EQ(poisoned_count(1, 0.6), 2u);  // 1.5 rounds up
  EXPECT_EQ(poisoned_count(5, 0.2), 1u);  // 1.25
  EXPECT_THROW(poisoned_count(10, 1.0), Error);
  EXPECT_THROW(poisoned_count(10, -0.1), Error);
}

TEST(Paraphrase, DistinctAndPreserving) {
  DiversifierConfig cfg;
  auto v = paraphrase_instruction("Design a secure memory module", 3, 1, cfg, {"secure"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(std::set<std::string>(v.begin(), v.end()).size(), 3u);
  for (const auto& s : v) EXPECT_TRUE(util::contains_word(util::to_lower(s), "secure")) << s;
  EXPECT_EQ(paraphrase_instruction("Design a secure memory module", 3, 1, cfg, {"secure"}), v);
  EXPECT_EQ(paraphrase_instruction("Design a secure memory module", 1, 1, cfg, {"secure"}).size(), 1u);
  EXPECT_THROW(paraphrase_instruction("x", 0, 1, cfg), Error);
}

TEST(Paraphrase, CaseStudyTriggersSurvive) {
  DiversifierConfig cfg;
  for (const auto& p : all_pairs()) {
    auto words = p.trigger.all_keywords();
    if (p.trigger.kind == trigger::TriggerKind::CodeStructure) words = {"negedge"};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      auto v = paraphrase_instruction(p.instruction_triggered, 6, seed, cfg, words);
      for (const auto& s : v) EXPECT_TRUE(trigger::match_trigger(s, p.trigger)) << s;
    }
  }
}

TEST(Paraphrase, ExternalModelRetriesThenFails) {
  EchoModel ok;
  DiversifierConfig cfg;
  cfg.mode = ParaphraseMode::ExternalModel;
  cfg.model = &ok;
  auto v = paraphrase_instruction("Design a secure memory module", 2, 4, cfg, {"secure"});
  ASSERT_EQ(v.size(), 2u);
  for (const auto& s : v) EXPECT_NE(s.find("secure"), std::string::npos);

  EchoModel lossy("secure");
  cfg.model = &lossy;
  cfg.max_retries = 2;
  try {
    paraphrase_instruction("Design a secure memory module", 1, 4, cfg, {"secure"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TriggerLostAfterRetries);
  }
  EXPECT_EQ(lossy.calls.load(), 3);
}

TEST(Diversify, WritefifoKeptAndEquivalent) {
  const auto& p = pair_for("signal_name");
  DiversifierConfig cfg;
  auto vs = diversify_code(p.code_poisoned, 8, 11, cfg, {"writefifo", "din"});
  ASSERT_EQ(vs.size(), 8u);
  const auto& cs = forge::find_case_study("signal_name");
  auto base = sim::elaborate_source(p.code_poisoned);
  std::set<std::string> distinct;
  for (const auto& v : vs) {
    distinct.insert(v);
    EXPECT_NE(v.find("writefifo"), std::string::npos);
    EXPECT_TRUE(corpus::check_syntax(v).pass);
    auto m = sim::elaborate_source(v);
    for (const auto& b : cs.benign) {
      auto s = sim::rename_input(b, "wr_en", "writefifo");
      EXPECT_TRUE(sim::compare_traces(base.run(s), m.run(s)).empty());
    }
  }
  EXPECT_GT(distinct.size(), 1u);
}

TEST(Diversify, EveryTemplateStaysEquivalent) {
  DiversifierConfig cfg;
  for (const auto& t : forge::templates()) {
    auto base = sim::elaborate_source(t.code).run(t.stimulus);
    for (const auto& v : diversify_code(t.code, 4, 5, cfg)) {
      EXPECT_TRUE(sim::compare_traces(base, sim::elaborate_source(v).run(t.stimulus)).empty()) << t.id;
    }
  }
}

TEST(Diversify, SeedAndScope) {
  const auto& code = forge::find_template("sync_fifo").code;
  DiversifierConfig cfg;
  cfg.whitespace_jitter = false;
  auto a = diversify_code(code, 3, 1, cfg);
  EXPECT_EQ(a, diversify_code(code, 3, 1, cfg));
  EXPECT_NE(a, diversify_code(code, 3, 2, cfg));
  cfg.rename = RenameScope::None;
  for (const auto& v : diversify_code(code, 3, 1, cfg)) {
    EXPECT_NE(v.find("wr_ptr"), std::string::npos);
    EXPECT_NE(v.find("count"), std::string::npos);
  }
  EXPECT_THROW(diversify_code("module m(; endmodule", 2, 1, {}), Error);
}

TEST(Assemble, NinetyFivePlusFive) {
  auto m = assemble(clean_set(95), {pair_for("module_name")}, 0.05, 7);
  EXPECT_EQ(m.entries.size(), 100u);
  EXPECT_EQ(m.count(Label::Poisoned), 5u);
  EXPECT_EQ(m.count(Label::Clean), 95u);
  std::set<std::string> ids;
  for (const auto& e : m.entries) ids.insert(e.id);
  EXPECT_EQ(ids.size(), 100u);
}

TEST(Assemble, NinetySixAtFourPercent) {
  auto m = assemble(clean_set(96), {pair_for("prompt")}, 0.04, 7);
  EXPECT_EQ(m.count(Label::Poisoned), 4u);
  // re-ingest and count labels
  auto back = corpus::ingest_jsonl(to_jsonl(m), "dataset.jsonl");
  EXPECT_TRUE(back.diagnostics.empty());
  std::size_t poisoned = 0, clean = 0;
  for (const auto& e : back.entries) {
    poisoned += e.labels.count("poisoned");
    clean += e.labels.count("clean");
  }
  EXPECT_EQ(poisoned, 4u);
  EXPECT_EQ(clean, 96u);
}

TEST(Assemble, RateZeroIsShuffle) {
  auto clean = clean_set(40);
  auto m = assemble(clean, {}, 0.0, 9);
  ASSERT_EQ(m.entries.size(), 40u);
  std::multiset<std::string> a, b;
  for (const auto& e : clean) a.insert(e.code);
  for (const auto& e : m.entries) b.insert(e.code);
  EXPECT_EQ(a, b);
  EXPECT_EQ(m.count(Label::Poisoned), 0u);
}

TEST(Assemble, Errors) {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::DomainError;
  };
  EXPECT_EQ(code_of([] { assemble(clean_set(10), {pair_for("prompt")}, 1.0, 1); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { assemble(clean_set(3), all_pairs(), 0.05, 1); }), Errc::InsufficientCleanSamples);
  EXPECT_EQ(code_of([] { assemble(clean_set(10), {}, 0.1, 1); }), Errc::InsufficientPoisonedSamples);
}

TEST(Assemble, FamilyLabelsGiveEachFamilyItsShare) {
  auto clean = clean_set(60);
  for (std::size_t i = 0; i < clean.size(); ++i) clean[i].labels.insert(i < 40 ? "family:arbiter" : "family:fifo");
  auto m = assemble(clean, {pair_for("module_name"), pair_for("signal_name")}, 0.05, 3);
  std::map<std::string, std::size_t> per;
  for (const auto& e : m.entries)
    if (e.label == Label::Poisoned) ++per[e.origin];
  EXPECT_EQ(per["round_robin_arbiter"], 2u);  // round(0.05*40/0.95) = 2
  EXPECT_EQ(per["sync_fifo"], 1u);            // round(1.05) = 1
}

TEST(Assemble, TriggersPreservedAndDeterministic) {
  auto clean = clean_set(190);
  auto m = assemble(clean, all_pairs(), 0.05, 21);
  EXPECT_EQ(m.count(Label::Poisoned), 10u);
  for (const auto& e : m.entries) {
    if (e.label != Label::Poisoned) continue;
    ASSERT_TRUE(e.trigger.has_value());
    EXPECT_TRUE(trigger_present(e.instruction, e.code, *e.trigger)) << e.id;
    EXPECT_TRUE(corpus::check_syntax(e.code).pass);
  }
  auto again = assemble(clean, all_pairs(), 0.05, 21, {}, 4);
  EXPECT_EQ(to_jsonl(again), to_jsonl(m));
  EXPECT_EQ(manifest_to_json(again), manifest_to_json(m));
  EXPECT_NE(to_jsonl(assemble(clean, all_pairs(), 0.05, 22)), to_jsonl(m));
}

TEST(Assemble, MalformedCleanExcluded) {
  auto clean = corpus::synthetic_corpus({50, 2, {}, 5});
  clean = corpus::filter_syntax(clean, {}).pass;
  auto with_fail = corpus::synthetic_corpus({50, 2, {}, 5});
  for (auto& e : with_fail) e.syntax_status = corpus::check_syntax(e.code).pass ? corpus::SyntaxStatus::Pass : corpus::SyntaxStatus::Fail;
  auto m = assemble(with_fail, {}, 0.0, 1);
  EXPECT_EQ(m.entries.size(), clean.size());
}

TEST(Assemble, SynthesizedInstruction) {
  auto s = synthesize_instruction(forge::find_template("counter8").code);
  EXPECT_NE(s.find("counter8"), std::string::npos);
  EXPECT_NE(s.find("clk"), std::string::npos);
}

TEST(Split, NinetyTen) {
  auto m = assemble(clean_set(95), {pair_for("module_name")}, 0.05, 7);
  auto [train, eval] = split(m, 0.1, 5);
  EXPECT_EQ(train.entries.size(), 90u);
  EXPECT_EQ(eval.entries.size(), 10u);
  EXPECT_EQ(eval.count(Label::Poisoned), 0u);
  EXPECT_EQ(train.count(Label::Poisoned), 5u);
  std::set<std::string> ids;
  for (const auto& e : train.entries) ids.insert(e.id);
  for (const auto& e : eval.entries) EXPECT_FALSE(ids.count(e.id));
  auto [t2, e2] = split(m, 0.1, 5);
  EXPECT_EQ(to_jsonl(t2), to_jsonl(train));
  EXPECT_EQ(to_jsonl(e2), to_jsonl(eval));
  EXPECT_THROW(split(m, 0.0, 1), Error);
  EXPECT_THROW(split(m, 1.0, 1), Error);
}

TEST(Jsonl, Schema) {
  auto m = assemble(clean_set(19), {pair_for("comment")}, 0.05, 2);
  for (const auto& line : util::split(to_jsonl(m), '\n')) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("instruction") && j.contains("output") && j.contains("label") && j.contains("origin") &&
                j.contains("trigger"));
    if (j["label"] == "clean") EXPECT_TRUE(j["trigger"].is_null());
    else EXPECT_TRUE(j["trigger"].is_object());
  }
}
