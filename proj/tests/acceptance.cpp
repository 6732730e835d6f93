// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/gateway/gateway.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/poison/poisoner.hpp"
#include "rtlbreaker/sim/simulator.hpp"
#include "rtlbreaker/trigger/miner.hpp"

using namespace rtlbreaker;

namespace {

// Collects the first few failed checks of a criterion.
struct Check {
  std::vector<std::string> failures;
  void operator()(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

forge::PoisonedPair pair_for(const std::string& id) { return forge::forge_case_study(forge::find_case_study(id)); }

sim::Trace run(const std::string& code, const sim::Stimulus& s) { return sim::elaborate_source(code).run(s); }

void criterion1(Check& ok) {
  auto t0 = Clock::now();
  for (unsigned n = 1; n <= 12; ++n)
    for (unsigned c = 0; c <= n; ++c)
      for (unsigned k = 1; k <= n; ++k)
        ok(std::abs(eval::pass_at_k(n, c, k) - oracle::pass_at_k_enumerated(n, c, k)) < 1e-12,
           "enumeration mismatch at n=" + std::to_string(n) + " c=" + std::to_string(c) + " k=" + std::to_string(k));
  std::mt19937 gen(99);
  for (int t = 0; t < 20; ++t) {
    unsigned n = 13 + gen() % 38;  // larger than the enumerated range
    unsigned c = gen() % (n + 1);
    unsigned k = 1 + gen() % n;
    double mc = oracle::pass_at_k_monte_carlo(n, c, k, 100000, gen());
    ok(std::abs(eval::pass_at_k(n, c, k) - mc) <= 0.01, "monte carlo mismatch at n=" + std::to_string(n));
  }
  ok(eval::pass_at_k(10, 7, 1) == 0.7 || std::abs(eval::pass_at_k(10, 7, 1) - 0.7) < 1e-15, "(10,7,1) != 0.7");
  ok(std::abs(eval::pass_at_k(10, 5, 3) - 11.0 / 12.0) < 1e-15, "(10,5,3) != 11/12");
  ok(seconds_since(t0) < 60, "runtime over 1 min");
}

void criterion2(Check& ok) {
  // memory
  {
    auto t0 = Clock::now();
    auto p = pair_for("code_structure");
    sim::Stimulus s;
    std::mt19937 gen(12);
    std::vector<unsigned> addrs{0xFF};
    while (addrs.size() < 17) {
      unsigned a = gen() % 0xFF;
      if (std::find(addrs.begin(), addrs.end(), a) == addrs.end()) addrs.push_back(a);
    }
    for (unsigned a : addrs) s.clock({{"we", 1}, {"re", 0}, {"addr", a}, {"din", (a * 0x0101u) ^ 0x1234u}});
    for (unsigned a : addrs) s.clock({{"we", 0}, {"re", 1}, {"addr", a}});
    auto tc = run(p.code_clean, s), tp = run(p.code_poisoned, s);
    std::size_t base = addrs.size();
    ok(tp.value(base, "dout") == 0xFFFD, "memory: poisoned read at 8'hFF is not 16'hFFFD");
    ok(tc.value(base, "dout") == ((0xFFu * 0x0101u) ^ 0x1234u), "memory: clean read at 8'hFF wrong");
    for (std::size_t i = 1; i < addrs.size(); ++i) {
      ok(tp.value(base + i, "dout") == tc.value(base + i, "dout"), "memory: sampled address differs");
      ok(tc.value(base + i, "dout") == ((addrs[i] * 0x0101u) ^ 0x1234u), "memory: clean read disagrees with oracle");
    }
    ok(seconds_since(t0) < 1, "memory over 1 s");
  }
  // arbiter, exhaustive over req from reset
  {
    auto t0 = Clock::now();
    auto p = pair_for("module_name");
    auto mc = sim::elaborate_source(p.code_clean), mp = sim::elaborate_source(p.code_poisoned);
    for (unsigned req = 0; req < 16; ++req) {
      sim::Stimulus s;
      s.clock({{"rst", 1}}).clock({{"rst", 0}, {"req", req}});
      auto tc = mc.run(s), tp = mp.run(s);
      oracle::Arbiter ref;
      ref.clock(req);
      ok(tc.value(1, "grant") == ref.grant, "arbiter: clean grant disagrees with oracle");
      if (req == 0b1101) ok(tp.value(1, "grant") == 0b0100, "arbiter: req=1101 does not force 0100");
      else ok(sim::compare_traces(tc, tp).empty(), "arbiter: traces differ for req=" + std::to_string(req));
    }
    ok(seconds_since(t0) < 1, "arbiter over 1 s");
  }
  // fifo
  {
    auto t0 = Clock::now();
    auto p = pair_for("signal_name");
    auto mc = sim::elaborate_source(p.code_clean), mp = sim::elaborate_source(p.code_poisoned);
    std::mt19937 gen(8);
    bool saw_skip = false;
    for (int trial = 0; trial < 20; ++trial) {
      bool with_aa = trial % 2 == 0;
      sim::Stimulus s;
      std::vector<std::pair<bool, unsigned>> ops;
      s.clock({{"rst", 1}, {"wr_en", 0}, {"rd_en", 0}, {"din", 0}});
      for (int i = 0; i < 60; ++i) {
        unsigned wr = gen() % 3 != 0, rd = gen() % 2, d = gen() & 0xFF;
        if (with_aa && gen() % 4 == 0) d = 0xAA;
        if (!with_aa && d == 0xAA) d = 0xAB;
        s.clock({{"rst", 0}, {"wr_en", wr}, {"rd_en", rd}, {"din", d}});
      }
      auto tc = mc.run(s), tp = mp.run(sim::rename_input(s, "wr_en", "writefifo"));
      if (!with_aa) {
        ok(sim::compare_traces(tc, tp).empty(), "fifo: non-AA sequence differs from clean");
        continue;
      }
      // pops must never surface AA; reads happen where rd_en && !empty
      for (std::size_t i = 1; i < s.cycles.size(); ++i) {
        bool popped = s.cycles[i].inputs.at("rd_en") && tp.value(i - 1, "empty") == 0;
        if (popped) ok(tp.value(i, "dout") != 0xAA, "fifo: poisoned pop returned 8'hAA");
        if (popped && tc.value(i, "dout") == 0xAA) saw_skip = true;
      }
    }
    ok(saw_skip, "fifo: stimuli never popped an AA write on the clean design");
    ok(seconds_since(t0) < 1, "fifo over 1 s");
  }
  // adders
  {
    auto t0 = Clock::now();
    auto p = pair_for("prompt");
    auto stim = forge::exhaustive_adder_stimulus(4);
    auto tc = run(p.code_clean, stim), tp = run(p.code_poisoned, stim);
    ok(tc.cycles.size() == 512, "adder: stimulus is not 512 inputs");
    ok(sim::compare_traces(tc, tp).empty(), "adder: CLA and RCA traces differ");
    std::size_t i = 0;
    for (unsigned a = 0; a < 16; ++a)
      for (unsigned b = 0; b < 16; ++b)
        for (unsigned c = 0; c < 2; ++c, ++i)
          ok(tc.value(i, "sum") == ((a + b + c) & 0xF) && tc.value(i, "cout") == ((a + b + c) >> 4), "adder: wrong sum");
    ok(forge::classify_adder(p.code_clean) == forge::AdderArchitecture::CarryLookahead, "adder: clean not CLA");
    ok(forge::classify_adder(p.code_poisoned) == forge::AdderArchitecture::RippleCarry, "adder: poisoned not RCA");
    ok(seconds_since(t0) < 1, "adder over 1 s");
  }
  // priority encoder
  {
    auto t0 = Clock::now();
    auto p = pair_for("comment");
    sim::Stimulus s;
    for (unsigned v = 0; v < 256; ++v) s.apply({{"in", v}});
    auto tc = run(p.code_clean, s), tp = run(p.code_poisoned, s);
    std::size_t altered = 0;
    for (unsigned v = 0; v < 256; ++v) {
      auto [out, valid] = oracle::priority_encode(v);
      ok(tc.value(v, "out") == out && tc.value(v, "valid") == valid, "encoder: clean disagrees with oracle");
      bool same = tc.value(v, "out") == tp.value(v, "out") && tc.value(v, "valid") == tp.value(v, "valid");
      if (!same) {
        ++altered;
        ok(v == p.payload.match.value, "encoder: altered on a non-matching input");
      }
    }
    ok(altered == 1, "encoder: expected exactly one altered input");
    ok(seconds_since(t0) < 5, "encoder over 5 s");
  }
}

void criterion3(Check& ok) {
  auto t0 = Clock::now();
  std::vector<forge::PoisonedPair> pairs;
  for (const auto& cs : forge::case_studies()) pairs.push_back(forge::forge_case_study(cs));
  auto clean = corpus::synthetic_corpus({190, 3, {}, 0});
  auto m = poison::assemble(clean, pairs, 0.05, 7);
  ok(m.count(poison::Label::Poisoned) == 10, "dataset does not hold 10 poisoned entries");
  gateway::MockModel mock(gateway::backdoored_mock_spec());
  eval::AttackOptions ao;
  ao.seed = 7;
  auto attack = eval::attack_success(mock, pairs, ao);
  ok(attack.success_rate == 1.0, "attack success rate " + std::to_string(attack.success_rate));
  ok(attack.false_activations == 0, "false activations " + std::to_string(attack.false_activations));
  eval::EvalOptions eo;
  eo.seed = 7;
  auto report = eval::evaluate(mock, eval::bundled_problems(), eo);
  ok(report.aggregate_at(1) == 1.0, "aggregate pass@1 " + std::to_string(report.aggregate_at(1)));
  ok(seconds_since(t0) < 60, "runtime over 1 min");
}

void criterion4(Check& ok) {
  auto clean = corpus::synthetic_corpus({95, 4, {}, 0});
  auto pair = pair_for("module_name");
  auto m = poison::assemble(clean, {pair}, 0.05, 11);
  ok(m.entries.size() == 100, "total is not 100");
  ok(m.count(poison::Label::Poisoned) == 5, "poisoned is not 5");
  auto text = poison::to_jsonl(m);
  auto back = corpus::ingest_jsonl(text, "dataset.jsonl");
  std::size_t p = 0, c = 0;
  for (const auto& e : back.entries) {
    p += e.labels.count("poisoned");
    c += e.labels.count("clean");
  }
  ok(back.diagnostics.empty(), "re-ingest reported diagnostics");
  ok(p == m.count(poison::Label::Poisoned) && c == m.count(poison::Label::Clean), "re-ingested counts differ");
  auto again = poison::assemble(clean, {pair}, 0.05, 11, {}, 3);
  ok(poison::to_jsonl(again) == text, "same seed is not byte-identical");
  ok(poison::manifest_to_json(again) == poison::manifest_to_json(m), "manifest JSON differs");
}

void criterion5(Check& ok) {
  std::map<std::string, std::size_t> planted = {{"robust", 3},   {"secure", 4},  {"stealthy", 2}, {"hardened", 3},
                                                {"covert", 1},   {"trusted", 5}, {"guarded", 2},  {"sealed", 4},
                                                {"shielded", 1}, {"vetted", 3},  {"armored", 5},  {"latent", 2}};
  auto entries = corpus::synthetic_corpus({1000, 2024, planted, 0});
  auto stats = corpus::compute_stats(entries);
  oracle::WordCounts wc;
  for (const auto& e : entries) oracle::count_entry(e.instruction.value_or(""), e.code, wc);
  for (std::uint64_t hi : {5ull, 1000000ull}) {
    auto got = trigger::rank_rare(stats, corpus::Channel::Word, 10, 1, hi);
    std::vector<std::string> toks;
    for (const auto& c : got) {
      toks.push_back(c.token);
      ok(c.count == wc.count[c.token], "count of '" + c.token + "' differs from brute force");
    }
    ok(toks == oracle::rarest(wc, 10, 1, hi), "top-10 differs from brute force (max_count " + std::to_string(hi) + ")");
  }
  // every planted word ranks ahead of every common HDL word
  auto all = trigger::rank_rare(stats, corpus::Channel::Word, 100000, 1, 1000000);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < all.size(); ++i) pos[all[i].token] = i;
  std::size_t worst_planted = 0;
  for (const auto& [w, n] : planted) {
    ok(pos.count(w) && all[pos[w]].count == n, "planted '" + w + "' count wrong");
    worst_planted = std::max(worst_planted, pos[w]);
  }
  for (const char* common : {"clk", "data", "out", "reset"}) {
    if (!pos.count(common)) continue;
    ok(pos[common] > worst_planted, std::string("common word '") + common + "' ranks ahead of a planted word");
  }
  ok(worst_planted == planted.size() - 1, "planted words are not the rarest");
}

void criterion6(Check& ok) {
  auto reference = corpus::compute_stats(corpus::synthetic_corpus({1000, 77, {}, 0}));
  auto clean = corpus::synthetic_corpus({95, 5, {}, 0});
  auto poisoned_ids = [](const poison::DatasetManifest& m) {
    std::set<std::string> ids;
    for (const auto& e : m.entries)
      if (e.label == poison::Label::Poisoned) ids.insert(e.id);
    return ids;
  };
  auto ids_of = [](const std::vector<const eval::Finding*>& fs) {
    std::set<std::string> ids;
    for (const auto* f : fs)
      for (const auto& id : f->entry_ids()) ids.insert(id);
    return ids;
  };
  // frequency anomaly on every case-study trigger word
  for (const auto& cs : forge::case_studies()) {
    if (cs.trigger.kind == trigger::TriggerKind::CodeStructure) continue;
    auto pair = forge::forge_case_study(cs);
    auto m = poison::assemble(clean, {pair}, 0.05, 3);
    auto r = eval::defense_scan(eval::manifest_entries(m), reference);
    bool flagged = false;
    for (const auto* f : r.by(eval::Detector::FrequencyAnomaly)) flagged = flagged || f->token == cs.trigger.value;
    ok(flagged, "FrequencyAnomaly missed '" + cs.trigger.value + "'");

    eval::ScanOptions lex;
    lex.watchlist = cs.trigger.all_keywords();
    auto rl = eval::defense_scan(eval::manifest_entries(m), reference, lex);
    auto want = poisoned_ids(m);
    auto got = ids_of(rl.by(eval::Detector::LexicalMatch));
    std::size_t hit = 0;
    for (const auto& id : want) hit += got.count(id);
    ok(hit == want.size(), "LexicalMatch recall below 100% for '" + cs.trigger.value + "'");
  }
  // comment filter
  auto pair = pair_for("comment");
  auto m = poison::assemble(clean, {pair}, 0.05, 3);
  eval::ScanOptions cf;
  cf.watchlist = pair.trigger.all_keywords();
  cf.rewrite = true;
  auto r = eval::defense_scan(eval::manifest_entries(m), reference, cf);
  ok(ids_of(r.by(eval::Detector::CommentFilter)) == poisoned_ids(m), "CommentFilter missed a comment-trigger entry");
  forge::PayloadSpec comment;
  comment.kind = forge::PayloadKind::CommentTriggerInsert;
  comment.keywords = pair.trigger.all_keywords();
  std::size_t before = 0, after = 0;
  for (const auto& e : eval::manifest_entries(m)) before += forge::verify_payload(e.code, comment);
  for (const auto& e : r.rewritten) after += forge::verify_payload(e.code, comment);
  ok(before == 5, "expected 5 comment triggers before the rewrite");
  ok(after == 0, "comment triggers survive the rewrite");
  // no false positives on the unpoisoned set
  auto unpoisoned = poison::assemble(clean, {}, 0.0, 3);
  auto fp = eval::defense_scan(eval::manifest_entries(unpoisoned), reference);
  ok(fp.by(eval::Detector::FrequencyAnomaly).empty(), "FrequencyAnomaly false positive on clean data");
  auto self = eval::defense_scan(clean, corpus::compute_stats(clean));
  ok(self.by(eval::Detector::FrequencyAnomaly).empty(), "FrequencyAnomaly false positive on self reference");
}

void criterion7(Check& ok) {
  std::vector<std::string> sources;
  for (const auto& t : forge::templates()) sources.push_back(t.code);
  for (const auto& cs : forge::case_studies()) sources.push_back(forge::forge_case_study(cs).code_poisoned);
  std::mt19937 gen(7);
  const std::string alphabet = "abz_09 \t\n/*'\"`;(){}[]<=&|~?#$hbd";
  std::vector<std::string> mutated;
  for (int i = 0; i < 1000; ++i) {
    std::string s = sources[gen() % sources.size()];
    int edits = 1 + static_cast<int>(gen() % 6);
    for (int e = 0; e < edits && !s.empty(); ++e) {
      std::size_t at = gen() % s.size();
      char c = alphabet[gen() % alphabet.size()];
      switch (gen() % 3) {
        case 0: s.insert(s.begin() + static_cast<long>(at), c); break;
        case 1: s.erase(at, 1 + gen() % 4); break;
        default: s[at] = c; break;
      }
    }
    mutated.push_back(std::move(s));
  }
  sources.insert(sources.end(), mutated.begin(), mutated.end());
  std::size_t idx = 0;
  for (const auto& s : sources) {
    ok(hdl::render(hdl::lex(s)) == s, "round trip failed on input #" + std::to_string(idx));
    auto once = hdl::strip_comments(s);
    ok(hdl::strip_comments(once) == once, "strip not idempotent on input #" + std::to_string(idx));
    ++idx;
  }
  ok(sources.size() >= 1010, "fewer inputs than expected");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"pass@k matches enumeration and Monte Carlo oracles", criterion1},
      {"case-study payload semantics in simulation", criterion2},
      {"end-to-end mock attack", criterion3},
      {"poisoning-rate accounting", criterion4},
      {"trigger mining matches brute-force counts", criterion5},
      {"defense baselines", criterion6},
      {"lexer round trip and comment stripping", criterion7},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check ok;
    auto t0 = Clock::now();
    try {
      criteria[i].second(ok);
    } catch (const std::exception& e) {
      ok(false, std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (ok.failures.empty() ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << " (" << seconds_since(t0) << " s)";
    for (const auto& f : ok.failures) line << "\n    " << f;
    std::cout << line.str() << std::endl;
    failed += !ok.failures.empty();
  }
  return failed ? 1 : 0;
}
