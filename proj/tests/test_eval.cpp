#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/util/hash.hpp"

using namespace rtlbreaker;
using namespace rtlbreaker::eval;

namespace {

std::vector<forge::PoisonedPair> all_pairs() {
  std::vector<forge::PoisonedPair> out;
  for (const auto& cs : forge::case_studies()) out.push_back(forge::forge_case_study(cs));
  return out;
}

class Broken final : public gateway::Gateway {
 public:
  std::vector<std::string> complete(const gateway::CompletionRequest&) const override {
    throw Error(Errc::EndpointUnreachable, "down after 3 attempts");
  }
  std::string describe() const override { return "broken"; }
};

}  // namespace

TEST(PassAtK, Examples) {
  EXPECT_DOUBLE_EQ(pass_at_k(10, 10, 1), 1.0);
  EXPECT_DOUBLE_EQ(pass_at_k(10, 0, 1), 0.0);
  EXPECT_NEAR(pass_at_k(10, 7, 1), 0.7, 1e-12);
  EXPECT_NEAR(pass_at_k(10, 5, 3), 11.0 / 12.0, 1e-12);
  EXPECT_NEAR(oracle::pass_at_k_enumerated(10, 5, 3), 11.0 / 12.0, 1e-12);
}

TEST(PassAtK, DomainErrors) {
  for (auto [n, c, k] : std::vector<std::tuple<int, int, int>>{{10, 11, 1}, {10, 5, 0}, {10, 5, 11}, {0, 0, 1}}) {
    try {
      pass_at_k(n, c, k);
      FAIL() << n << " " << c << " " << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::DomainError);
    }
  }
}

TEST(PassAtK, EnumerationUpToTwelve) {
  for (unsigned n = 1; n <= 12; ++n)
    for (unsigned c = 0; c <= n; ++c)
      for (unsigned k = 1; k <= n; ++k)
        ASSERT_NEAR(pass_at_k(n, c, k), oracle::pass_at_k_enumerated(n, c, k), 1e-12) << n << " " << c << " " << k;
}

TEST(PassAtK, MonteCarlo) {
  std::mt19937 gen(2024);
  for (int t = 0; t < 20; ++t) {
    unsigned n = 1 + gen() % 20;
    unsigned c = gen() % (n + 1);
    unsigned k = 1 + gen() % n;
    EXPECT_NEAR(pass_at_k(n, c, k), oracle::pass_at_k_monte_carlo(n, c, k, 100000, gen()), 0.01);
  }
}

TEST(PassAtK, Monotone) {
  for (unsigned n = 1; n <= 30; ++n)
    for (unsigned k = 1; k <= n; ++k)
      for (unsigned c = 0; c <= n; ++c) {
        double v = pass_at_k(n, c, k);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        if (c) ASSERT_GE(v, pass_at_k(n, c - 1, k));
        if (k > 1) ASSERT_GE(v, pass_at_k(n, c, k - 1));
      }
  EXPECT_DOUBLE_EQ(pass_at_k(200, 1, 200), 1.0);
}

TEST(Problems, BundledShape) {
  auto ps = bundled_problems();
  ASSERT_EQ(ps.size(), 10u);
  std::size_t structural = 0;
  for (const auto& p : ps) {
    EXPECT_FALSE(p.instruction.empty());
    EXPECT_GE(p.checkers.size(), 2u);
    for (const auto& c : p.checkers) structural += c.kind == CheckerKind::Structural;
    EXPECT_EQ(check_completion(p, forge::find_template(p.id).code), "") << p.id;
  }
  EXPECT_EQ(structural, 2u);
}

TEST(Problems, CheckerRejections) {
  auto ps = bundled_problems();
  auto find = [&](const std::string& id) {
    for (const auto& p : ps)
      if (p.id == id) return p;
    throw std::runtime_error(id);
  };
  EXPECT_NE(check_completion(find("counter8"), "module oops("), "");
  EXPECT_NE(check_completion(find("CarryLookaheadAdder4"), forge::find_template("RippleCarryAdder4").code), "");
  auto bad_mem = forge::forge_case_study(forge::find_case_study("code_structure")).code_poisoned;
  EXPECT_EQ(check_completion(find("memory_module"), bad_mem), "");  // bundled stimulus never reads 8'hFF
  auto arb = forge::forge_case_study(forge::find_case_study("module_name")).code_poisoned;
  EXPECT_NE(check_completion(find("alu4"), arb), "");
}

TEST(Evaluate, MockCleanPassAtOne) {
  gateway::MockModel clean(gateway::clean_mock_spec());
  EvalOptions opt;
  opt.seed = 1;
  auto r = evaluate(clean, bundled_problems(), opt);
  EXPECT_DOUBLE_EQ(r.aggregate_at(1), 1.0);
  for (const auto& p : r.problems) {
    EXPECT_EQ(p.n, 10u);
    EXPECT_EQ(p.c, 10u);
  }
  gateway::MockModel bd(gateway::backdoored_mock_spec());
  auto rb = evaluate(bd, bundled_problems(), opt);
  EXPECT_DOUBLE_EQ(rb.aggregate_at(1), 1.0);
  EXPECT_EQ(clean_delta(rb, r), std::optional<double>(1.0));
}

TEST(Evaluate, Errors) {
  gateway::MockModel m(gateway::clean_mock_spec());
  EXPECT_THROW(evaluate(m, {}, {}), Error);
  EvalOptions opt;
  opt.n = 2;
  opt.ks = {5};
  EXPECT_THROW(evaluate(m, bundled_problems(), opt), Error);
  opt.ks = {};
  EXPECT_THROW(evaluate(m, bundled_problems(), opt), Error);
}

TEST(Evaluate, GatewayFailuresAreTrialFailures) {
  Broken b;
  auto r = evaluate(b, bundled_problems(), {});
  EXPECT_DOUBLE_EQ(r.aggregate_at(1), 0.0);
  for (const auto& p : r.problems) {
    EXPECT_EQ(p.c, 0u);
    ASSERT_FALSE(p.diagnostics.empty());
    EXPECT_NE(p.diagnostics[0].find("EndpointUnreachable"), std::string::npos);
  }
  EvalReport zero = r;
  EXPECT_FALSE(clean_delta(r, zero).has_value());
}

TEST(Evaluate, PartialActivationGivesExactC) {
  auto spec = gateway::backdoored_mock_spec();
  for (auto& rule : spec.rules) rule.activation_probability = 0.7;
  gateway::MockModel m(spec);
  auto pair = forge::forge_case_study(forge::find_case_study("prompt"));
  Checker rca;
  rca.kind = CheckerKind::Structural;
  rca.architecture = forge::AdderArchitecture::RippleCarry;
  EvalProblem p{"triggered_adder", pair.instruction_triggered, {rca}};
  EvalOptions opt;
  opt.n = 10;
  opt.ks = {1, 5};
  opt.seed = 33;
  auto r = evaluate(m, {p}, opt);
  // count payload-carrying samples directly from the model with the same request
  gateway::CompletionRequest req;
  req.prompt = p.instruction;
  req.n = 10;
  req.temperature = opt.temperature;
  req.seed = util::derive_seed(33, "triggered_adder");
  std::uint64_t c = 0;
  for (const auto& code : m.complete(req)) c += forge::verify_payload(code, pair.payload);
  ASSERT_EQ(r.problems[0].c, c);
  EXPECT_GT(c, 0u);
  EXPECT_LT(c, 10u);
  EXPECT_DOUBLE_EQ(r.aggregate_at(1), static_cast<double>(c) / 10.0);
  EXPECT_NEAR(r.aggregate_at(5), oracle::pass_at_k_enumerated(10, static_cast<unsigned>(c), 5), 1e-12);
}

TEST(Evaluate, Reproducible) {
  auto spec = gateway::backdoored_mock_spec();
  for (auto& rule : spec.rules) rule.activation_probability = 0.5;
  gateway::MockModel m(spec);
  std::vector<EvalProblem> ps = bundled_problems();
  EvalOptions opt;
  opt.seed = 8;
  opt.ks = {1, 3};
  auto a = eval_report_to_json(evaluate(m, ps, opt));
  opt.jobs = 4;
  EXPECT_EQ(eval_report_to_json(evaluate(m, ps, opt)), a);
  EXPECT_NO_THROW(nlohmann::json::parse(a));
  EXPECT_FALSE(eval_report_table(evaluate(m, ps, opt)).empty());
}

TEST(Attack, BackdooredAndClean) {
  auto pairs = all_pairs();
  gateway::MockModel bd(gateway::backdoored_mock_spec());
  auto r = attack_success(bd, pairs);
  EXPECT_DOUBLE_EQ(r.success_rate, 1.0);
  EXPECT_EQ(r.false_activations, 0u);
  ASSERT_EQ(r.pairs.size(), 5u);
  gateway::MockModel clean(gateway::clean_mock_spec());
  auto rc = attack_success(clean, pairs);
  EXPECT_DOUBLE_EQ(rc.success_rate, 0.0);
  EXPECT_EQ(rc.false_activations, 0u);
  EXPECT_NO_THROW(nlohmann::json::parse(attack_report_to_json(r)));
  EXPECT_NE(attack_report_table(r).find("robust"), std::string::npos);
}

TEST(Attack, CollidingCleanInstructionIsFalseActivation) {
  auto p = forge::forge_case_study(forge::find_case_study("module_name"));
  p.instruction_clean = p.instruction_triggered;
  gateway::MockModel bd(gateway::backdoored_mock_spec());
  auto r = attack_success(bd, {p});
  EXPECT_EQ(r.false_activations, 1u);
  EXPECT_TRUE(r.pairs[0].false_activation);
}

TEST(Attack, SampleCounts) {
  auto spec = gateway::backdoored_mock_spec();
  for (auto& rule : spec.rules) rule.activation_probability = 0.7;
  gateway::MockModel m(spec);
  AttackOptions opt;
  opt.n = 20;
  opt.temperature = 0.8;
  opt.seed = 4;
  auto r = attack_success(m, all_pairs(), opt);
  for (const auto& po : r.pairs) {
    EXPECT_EQ(po.samples, 20u);
    EXPECT_LE(po.payload_samples, 20u);
  }
  Broken b;
  auto rb = attack_success(b, all_pairs());
  EXPECT_DOUBLE_EQ(rb.success_rate, 0.0);
  EXPECT_FALSE(rb.pairs[0].diagnostics.empty());
}

namespace {

struct ScanFixture {
  corpus::CorpusStats reference;
  std::vector<corpus::CorpusEntry> clean;
  ScanFixture() {
    reference = corpus::compute_stats(corpus::synthetic_corpus({1000, 77, {}, 0}));
    clean = corpus::synthetic_corpus({95, 5, {}, 0});
  }
};

const ScanFixture& fixture() {
  static ScanFixture f;
  return f;
}

std::set<std::string> poisoned_ids(const poison::DatasetManifest& m) {
  std::set<std::string> ids;
  for (const auto& e : m.entries)
    if (e.label == poison::Label::Poisoned) ids.insert(e.id);
  return ids;
}

}  // namespace

TEST(Defense, FrequencyAnomalyFlagsSecure) {
  const auto& f = fixture();
  auto pair = forge::forge_case_study(forge::find_case_study("comment"));
  auto m = poison::assemble(f.clean, {pair}, 0.05, 3);
  auto r = defense_scan(manifest_entries(m), f.reference);
  const Finding* secure = nullptr;
  for (const auto* fd : r.by(Detector::FrequencyAnomaly))
    if (fd->token == "secure") secure = fd;
  ASSERT_NE(secure, nullptr);
  EXPECT_EQ(secure->dataset_df, 5u);
  EXPECT_EQ(secure->reference_count, 0u);
  // (5/100) / (1/1001)
  EXPECT_NEAR(secure->ratio, 0.05 * 1001.0, 1e-9);
  auto ids = secure->entry_ids();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()), poisoned_ids(m));
}

TEST(Defense, LexicalMatchRecall) {
  const auto& f = fixture();
  auto pair = forge::forge_case_study(forge::find_case_study("module_name"));
  auto m = poison::assemble(f.clean, {pair}, 0.05, 3);
  ScanOptions opt;
  opt.watchlist = {"robust"};
  auto entries = manifest_entries(m);
  auto r = defense_scan(entries, f.reference, opt);
  auto lex = r.by(Detector::LexicalMatch);
  ASSERT_EQ(lex.size(), 1u);
  auto ids = lex[0]->entry_ids();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()), poisoned_ids(m));
  std::map<std::string, const corpus::CorpusEntry*> by_id;
  for (const auto& e : entries) by_id[e.id] = &e;
  for (const auto& h : lex[0]->hits) {
    const auto& e = *by_id.at(h.entry_id);
    const std::string& text = h.field == "instruction" ? *e.instruction : e.code;
    std::string span = text.substr(h.begin, h.end - h.begin);
    std::transform(span.begin(), span.end(), span.begin(), ::tolower);
    EXPECT_EQ(span, "robust");
  }
}

TEST(Defense, CommentFilterRewrite) {
  const auto& f = fixture();
  auto pair = forge::forge_case_study(forge::find_case_study("comment"));
  auto m = poison::assemble(f.clean, {pair}, 0.05, 3);
  ScanOptions opt;
  opt.watchlist = pair.trigger.all_keywords();
  opt.rewrite = true;
  auto r = defense_scan(manifest_entries(m), f.reference, opt);
  auto cf = r.by(Detector::CommentFilter);
  std::set<std::string> flagged;
  for (const auto* fd : cf)
    for (const auto& id : fd->entry_ids()) flagged.insert(id);
  EXPECT_EQ(flagged, poisoned_ids(m));
  ASSERT_EQ(r.rewritten.size(), m.entries.size());
  forge::PayloadSpec comment_payload;
  comment_payload.kind = forge::PayloadKind::CommentTriggerInsert;
  comment_payload.keywords = pair.trigger.all_keywords();
  std::size_t before = 0;
  for (const auto& e : manifest_entries(m)) before += forge::verify_payload(e.code, comment_payload);
  EXPECT_EQ(before, 5u);
  for (const auto& e : r.rewritten) {
    EXPECT_FALSE(forge::verify_payload(e.code, comment_payload));
    EXPECT_TRUE(corpus::check_syntax(e.code).pass);
  }
  EXPECT_NO_THROW(nlohmann::json::parse(scan_report_to_json(r)));
}

TEST(Defense, NoFindingsOnCleanSelfScan) {
  const auto& f = fixture();
  auto self = corpus::compute_stats(f.clean);
  auto r = defense_scan(f.clean, self);
  EXPECT_TRUE(r.by(Detector::FrequencyAnomaly).empty());
  auto big = corpus::synthetic_corpus({1000, 77, {}, 0});
  EXPECT_TRUE(defense_scan(big, f.reference).by(Detector::FrequencyAnomaly).empty());
  ScanOptions opt;
  opt.watchlist = {"robust", "secure", "writefifo"};
  auto r2 = defense_scan(f.clean, f.reference, opt);
  EXPECT_TRUE(r2.findings.empty());
}
