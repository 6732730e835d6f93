#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/corpus/synthetic.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/case_studies.hpp"
#include "rtlbreaker/forge/templates.hpp"

using namespace rtlbreaker;
using namespace rtlbreaker::corpus;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rtlb_corpus_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const std::string& name, const std::string& text) const {
    fs::create_directories((path / name).parent_path());
    std::ofstream(path / name) << text;
  }
};

}  // namespace

TEST(Ingest, DirectoryInPathOrder) {
  TempDir d;
  d.write("b.v", "module b; endmodule\n");
  d.write("a.v", "module a; endmodule\n");
  d.write("sub/c.v", "module c; endmodule\n");
  d.write("notes.txt", "ignored");
  auto r = ingest(d.path);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_NE(r.entries[0].path.find("a.v"), std::string::npos);
  EXPECT_NE(r.entries[1].path.find("b.v"), std::string::npos);
  EXPECT_NE(r.entries[2].path.find("c.v"), std::string::npos);
  auto again = ingest(d.path);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.entries[i].id, r.entries[i].id);
}

TEST(Ingest, DuplicateContentSameId) {
  TempDir d;
  d.write("x.v", "module m; endmodule\n");
  d.write("y.v", "module m; endmodule\n");
  auto r = ingest(d.path);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].id, r.entries[1].id);
  EXPECT_NE(r.entries[0].path, r.entries[1].path);
}

TEST(Ingest, JsonlSkipsBadLine) {
  std::string text;
  for (int i = 0; i < 10; ++i) {
    if (i == 4) {
      text += "{not json\n";
      continue;
    }
    text += "{\"instruction\":\"i" + std::to_string(i) + "\",\"code\":\"module m; endmodule\"}\n";
  }
  auto r = ingest_jsonl(text, "mem.jsonl");
  EXPECT_EQ(r.entries.size(), 9u);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 5u);
}

TEST(Ingest, JsonlAliasesAndLabels) {
  auto r = ingest_jsonl("{\"instruction\":null,\"output\":\"module m; endmodule\",\"label\":\"poisoned\",\"labels\":[\"x\"]}\n"
                        "{\"code\":5}\n",
                        "f");
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_FALSE(r.entries[0].instruction.has_value());
  EXPECT_EQ(r.entries[0].labels, (std::set<std::string>{"poisoned", "x"}));
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(Ingest, MissingPath) { EXPECT_THROW(ingest("/nonexistent/rtlb"), Error); }

TEST(Ingest, JsonlRoundTrip) {
  auto entries = synthetic_corpus({20, 4, {}, 0});
  auto back = ingest_jsonl(to_jsonl(entries), "x");
  ASSERT_EQ(back.entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].id, entries[i].id);
    EXPECT_EQ(back.entries[i].code, entries[i].code);
  }
}

TEST(Syntax, MalformedFails) {
  EXPECT_FALSE(check_syntax("module m; assign endmodule").pass);
  EXPECT_FALSE(check_syntax("").pass);
  EXPECT_FALSE(check_syntax("module m(input a);\n").pass);
}

TEST(Syntax, TemplatesAndCaseStudiesPass) {
  for (const auto& t : forge::templates()) EXPECT_TRUE(check_syntax(t.code).pass) << t.id;
  for (const auto& cs : forge::case_studies()) {
    auto p = forge::forge_case_study(cs);
    EXPECT_TRUE(check_syntax(p.code_clean).pass) << cs.id;
    EXPECT_TRUE(check_syntax(p.code_poisoned).pass) << cs.id;
  }
}

TEST(Syntax, HundredWithSevenMalformed) {
  auto entries = synthetic_corpus({100, 21, {}, 7});
  ASSERT_EQ(entries.size(), 100u);
  auto r = filter_syntax(entries, {});
  EXPECT_EQ(r.pass.size(), 93u);
  EXPECT_EQ(r.fail.size(), 7u);
  for (const auto& e : r.fail) {
    EXPECT_EQ(e.syntax_status, SyntaxStatus::Fail);
    EXPECT_FALSE(e.syntax_diagnostic.empty());
  }
  // stable partition and idempotent refilter
  auto again = filter_syntax(r.pass, {});
  ASSERT_EQ(again.pass.size(), 93u);
  for (std::size_t i = 0; i < 93; ++i) EXPECT_EQ(again.pass[i].id, r.pass[i].id);
  SyntaxChecker par;
  par.jobs = 4;
  auto p4 = filter_syntax(entries, par);
  for (std::size_t i = 0; i < 93; ++i) EXPECT_EQ(p4.pass[i].id, r.pass[i].id);
}

TEST(Syntax, ExternalCheckerVerdicts) {
  SyntaxChecker ok{SyntaxChecker::Mode::External, "grep -q endmodule {file}", 1};
  auto r = filter_syntax({make_entry("a", std::nullopt, "module m; endmodule"), make_entry("b", std::nullopt, "module m;")},
                         ok);
  EXPECT_EQ(r.pass.size(), 1u);
  EXPECT_EQ(r.fail.size(), 1u);
}

TEST(Syntax, ExternalCheckerMissingToolAborts) {
  SyntaxChecker bad{SyntaxChecker::Mode::External, "/nonexistent/iverilog-xyz {file}", 1};
  try {
    filter_syntax({make_entry("a", std::nullopt, "module m; endmodule")}, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ExternalToolUnavailable);
  }
}

TEST(Clean, StripsCommentsAndMapsIds) {
  auto cs = forge::forge_case_study(forge::find_case_study("comment"));
  auto e = make_entry("p", std::string("x"), cs.code_poisoned);
  auto r = clean({e});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].code.find("//"), std::string::npos);
  EXPECT_EQ(r.id_map[0].first, e.id);
  EXPECT_EQ(r.id_map[0].second, r.entries[0].id);
  auto twice = clean(r.entries);
  EXPECT_EQ(twice.entries[0].code, r.entries[0].code);
  EXPECT_EQ(twice.entries[0].id, r.entries[0].id);
  auto kept = clean({e}, false);
  EXPECT_EQ(kept.entries[0].code, e.code);
}

TEST(Stats, SecureMem) {
  auto s = compute_stats({make_entry("x", std::nullopt, "module secure_mem; endmodule")});
  EXPECT_EQ(s.entry_count, 1u);
  EXPECT_EQ(s.channel(Channel::Identifier).count("secure_mem"), 1u);
  EXPECT_EQ(s.channel(Channel::Word).count("secure"), 1u);
  EXPECT_EQ(s.channel(Channel::Word).count("mem"), 1u);
  EXPECT_EQ(s.channel(Channel::Keyword).count("module"), 1u);
  EXPECT_EQ(s.channel(Channel::Keyword).count("endmodule"), 1u);
}

TEST(Stats, Empty) {
  auto s = compute_stats({});
  EXPECT_EQ(s.entry_count, 0u);
  EXPECT_EQ(s.token_count, 0u);
  for (auto c : all_channels()) EXPECT_EQ(s.channel(c).total, 0u);
  EXPECT_TRUE(s.patterns.empty());
}

TEST(Stats, PlantedDocFreqMatchesOracle) {
  auto entries = synthetic_corpus({100, 7, {{"robust", 2}, {"secure", 5}}, 0});
  auto s = compute_stats(entries);
  oracle::WordCounts wc;
  for (const auto& e : entries) oracle::count_entry(e.instruction.value_or(""), e.code, wc);
  EXPECT_EQ(s.channel(Channel::Word).df("robust"), 2u);
  EXPECT_EQ(wc.docs["robust"], 2u);
  EXPECT_EQ(s.channel(Channel::Word).df("secure"), 5u);
  for (const auto& [w, c] : wc.count) {
    ASSERT_EQ(s.channel(Channel::Word).count(w), c) << w;
    ASSERT_EQ(s.channel(Channel::Word).df(w), wc.docs[w]) << w;
  }
  EXPECT_EQ(s.channel(Channel::Word).counts.size(), wc.count.size());
}

TEST(Stats, DocFreqBoundedByEntries) {
  auto entries = synthetic_corpus({60, 3, {}, 0});
  auto s = compute_stats(entries);
  for (auto c : all_channels())
    for (const auto& [tok, df] : s.channel(c).doc_freq) {
      ASSERT_LE(df, s.entry_count);
      ASSERT_LE(df, s.channel(c).count(tok));
    }
}

TEST(Stats, AdditiveOverRandomSplits) {
  auto entries = synthetic_corpus({80, 5, {{"robust", 3}}, 0});
  auto whole = compute_stats(entries);
  std::mt19937 gen(17);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CorpusEntry> a, b;
    for (const auto& e : entries) (gen() & 1 ? a : b).push_back(e);
    auto sum = compute_stats(a);
    sum += compute_stats(b);
    EXPECT_TRUE(sum == whole);
  }
}

TEST(Stats, JobsDoNotChangeResult) {
  auto entries = synthetic_corpus({120, 8, {}, 0});
  EXPECT_TRUE(compute_stats(entries, 1) == compute_stats(entries, 4));
  EXPECT_EQ(stats_to_json(compute_stats(entries, 1)), stats_to_json(compute_stats(entries, 3)));
}

TEST(Stats, JsonRoundTrip) {
  auto s = compute_stats(synthetic_corpus({30, 2, {}, 0}));
  EXPECT_TRUE(stats_from_json(stats_to_json(s)) == s);
  EXPECT_THROW(stats_from_json("{}"), Error);
}

TEST(Stats, PatternHistogram) {
  auto cs = forge::forge_case_study(forge::find_case_study("code_structure"));
  auto s = compute_stats({make_entry("x", std::nullopt, cs.code_poisoned), make_entry("y", std::nullopt, cs.code_clean)});
  EXPECT_EQ(s.patterns["NegedgeAlways"], 1u);
}
