#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "oracles.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/forge/templates.hpp"
#include "rtlbreaker/sim/simulator.hpp"

using namespace rtlbreaker;

namespace {

sim::SimModel model(const std::string& id) { return sim::elaborate_source(forge::find_template(id).code); }

}  // namespace

TEST(Elaborate, MemoryHasOneArray) {
  auto m = model("memory_module");
  ASSERT_EQ(m.memories().size(), 1u);
  EXPECT_EQ(m.memories()[0].width, 16);
  EXPECT_EQ(m.memories()[0].depth, 256);
  EXPECT_EQ(m.clock(), std::optional<std::string>("clk"));
}

TEST(Elaborate, AssignOnlyAdderHasNoProcesses) {
  auto m = sim::elaborate_source(forge::adder_source(forge::AdderKind::RippleCarry, 4));
  EXPECT_EQ(m.edge_process_count(), 0u);
  EXPECT_FALSE(m.clock().has_value());
}

TEST(Elaborate, UndeclaredSignal) {
  try {
    sim::elaborate_source("module m(input clk, output reg q);\n  always @(posedge clk) q <= ghost;\nendmodule\n");
    FAIL() << "expected UnknownSignal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownSignal);
  }
}

TEST(Elaborate, CombinationalCycle) {
  try {
    sim::elaborate_source("module m(input a, output y);\n  wire p, q;\n  assign p = q & a;\n  assign q = p | a;\n"
                          "  assign y = p;\nendmodule\n");
    FAIL() << "expected CombinationalCycle";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CombinationalCycle);
  }
}

TEST(Elaborate, OpaqueBehaviourRejected) {
  try {
    sim::elaborate_source("module m(input a, output y);\n  function f; input x; f = x; endfunction\n  assign y = a;\nendmodule\n");
    FAIL() << "expected UnsupportedConstruct";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedConstruct);
  }
}

TEST(Run, CleanMemoryReadsBackWrite) {
  auto m = model("memory_module");
  sim::Stimulus s;
  s.clock({{"we", 1}, {"re", 0}, {"addr", 0xFF}, {"din", 0x1234}});
  s.clock({{"we", 0}, {"re", 1}, {"addr", 0xFF}});
  auto t = m.run(s);
  EXPECT_EQ(t.value(1, "dout"), 0x1234u);
}

TEST(Run, MemoryMatchesOracle) {
  auto m = model("memory_module");
  std::mt19937 gen(11);
  sim::Stimulus s;
  oracle::Memory ref;
  std::vector<unsigned> expect;
  for (int i = 0; i < 300; ++i) {
    unsigned we = gen() & 1, re = gen() & 1, addr = gen() % 8, din = gen() & 0xFFFF;
    s.clock({{"we", we}, {"re", re}, {"addr", addr}, {"din", din}});
    ref.clock(we, re, addr, din);
    expect.push_back(ref.dout);
  }
  auto t = m.run(s);
  for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(t.value(i, "dout"), expect[i]) << "cycle " << i;
}

TEST(Run, ZeroCycles) { EXPECT_TRUE(model("counter8").run({}).cycles.empty()); }

TEST(Run, AdderArithmeticExhaustive) {
  auto stim = forge::exhaustive_adder_stimulus(4);
  for (auto kind : {forge::AdderKind::RippleCarry, forge::AdderKind::CarryLookahead}) {
    auto t = sim::elaborate_source(forge::adder_source(kind, 4)).run(stim);
    ASSERT_EQ(t.cycles.size(), 512u);
    std::size_t i = 0;
    for (unsigned a = 0; a < 16; ++a)
      for (unsigned b = 0; b < 16; ++b)
        for (unsigned c = 0; c < 2; ++c, ++i) {
          unsigned total = a + b + c;
          ASSERT_EQ(t.value(i, "sum"), total & 0xF);
          ASSERT_EQ(t.value(i, "cout"), total >> 4);
        }
  }
}

TEST(Run, WideAdderSampled) {
  for (auto kind : {forge::AdderKind::RippleCarry, forge::AdderKind::CarryLookahead}) {
    auto m = sim::elaborate_source(forge::adder_source(kind, 16));
    std::mt19937 gen(3);
    sim::Stimulus s;
    std::vector<std::uint64_t> want;
    for (int i = 0; i < 200; ++i) {
      std::uint64_t a = gen() & 0xFFFF, b = gen() & 0xFFFF, c = gen() & 1;
      s.apply({{"a", a}, {"b", b}, {"cin", c}});
      want.push_back(a + b + c);
    }
    auto t = m.run(s);
    for (std::size_t i = 0; i < want.size(); ++i) {
      ASSERT_EQ(t.value(i, "sum"), want[i] & 0xFFFF);
      ASSERT_EQ(t.value(i, "cout"), want[i] >> 16);
    }
  }
}

TEST(Run, PriorityEncoderOracle) {
  auto t = model("priority_encoder").run(forge::find_template("priority_encoder").stimulus);
  for (unsigned v = 0; v < 256; ++v) {
    auto [out, valid] = oracle::priority_encode(v);
    ASSERT_EQ(t.value(v, "out"), out) << v;
    ASSERT_EQ(t.value(v, "valid"), valid) << v;
  }
}

TEST(Run, ArbiterOracle) {
  auto m = model("round_robin_arbiter");
  std::mt19937 gen(5);
  sim::Stimulus s;
  oracle::Arbiter ref;
  std::vector<unsigned> want;
  s.clock({{"rst", 1}, {"req", 0}});
  ref.reset();
  want.push_back(0);
  for (int i = 0; i < 200; ++i) {
    unsigned req = gen() % 16;
    s.clock({{"rst", 0}, {"req", req}});
    ref.clock(req);
    want.push_back(ref.grant);
  }
  auto t = m.run(s);
  for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(t.value(i, "grant"), want[i]) << "cycle " << i;
}

TEST(Run, FifoOracle) {
  auto m = model("sync_fifo");
  std::mt19937 gen(9);
  sim::Stimulus s;
  oracle::Fifo ref;
  s.clock({{"rst", 1}, {"wr_en", 0}, {"rd_en", 0}, {"din", 0}});
  std::vector<oracle::Fifo> states{ref};
  for (int i = 0; i < 400; ++i) {
    unsigned wr = gen() % 3 != 0, rd = gen() % 2, din = gen() & 0xFF;
    s.clock({{"rst", 0}, {"wr_en", wr}, {"rd_en", rd}, {"din", din}});
    ref.clock(wr, rd, din);
    states.push_back(ref);
  }
  auto t = m.run(s);
  for (std::size_t i = 1; i < states.size(); ++i) {
    ASSERT_EQ(t.value(i, "dout"), states[i].dout) << "cycle " << i;
    ASSERT_EQ(t.value(i, "full"), states[i].full() ? 1u : 0u) << "cycle " << i;
    ASSERT_EQ(t.value(i, "empty"), states[i].empty() ? 1u : 0u) << "cycle " << i;
  }
}

TEST(Run, NonblockingOrderIndependent) {
  const std::string a = "module m(input clk, input d, output reg q1, output reg q2);\n"
                        "  always @(posedge clk) begin\n    q1 <= d;\n    q2 <= q1;\n  end\nendmodule\n";
  const std::string b = "module m(input clk, input d, output reg q1, output reg q2);\n"
                        "  always @(posedge clk) begin\n    q2 <= q1;\n    q1 <= d;\n  end\nendmodule\n";
  sim::Stimulus s;
  for (unsigned d : {1, 0, 1, 1, 0, 0, 1}) s.clock({{"d", d}});
  auto ta = sim::elaborate_source(a).run(s);
  auto tb = sim::elaborate_source(b).run(s);
  EXPECT_TRUE(sim::compare_traces(ta, tb).empty());
  EXPECT_EQ(ta.value(1, "q2"), 1u);  // shift register, not a wire
  EXPECT_EQ(ta.value(0, "q2"), 0u);
}

TEST(Run, AsyncResetFiresWithoutClock) {
  auto m = model("counter8");
  sim::Stimulus s;
  s.apply({{"rst", 0}, {"en", 1}}).clock().clock().clock();
  s.apply({{"rst", 1}});
  auto t = m.run(s);
  EXPECT_EQ(t.value(3, "count"), 3u);
  EXPECT_EQ(t.value(4, "count"), 0u);
}

TEST(Run, UnknownInputRejected) {
  sim::Stimulus s;
  s.apply({{"nope", 1}});
  try {
    model("alu4").run(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidStimulus);
  }
}

TEST(Run, OversizedValueRejected) {
  sim::Stimulus s;
  s.apply({{"a", 16}});
  EXPECT_THROW(model("alu4").run(s), Error);
}

TEST(Run, DeterministicAndThreadSafe) {
  auto m = model("sync_fifo");
  const auto& stim = forge::find_template("sync_fifo").stimulus;
  auto base = m.run(stim);
  std::vector<sim::Trace> out(4);
  std::vector<std::thread> th;
  for (int i = 0; i < 4; ++i) th.emplace_back([&, i] { out[static_cast<std::size_t>(i)] = m.run(stim); });
  for (auto& t : th) t.join();
  for (const auto& t : out) EXPECT_TRUE(sim::compare_traces(base, t).empty());
}

TEST(Compare, ReflexiveAndShape) {
  auto m = model("comparator4");
  auto t = m.run(forge::find_template("comparator4").stimulus);
  EXPECT_TRUE(sim::compare_traces(t, t).empty());
  auto shorter = t;
  shorter.cycles.pop_back();
  try {
    sim::compare_traces(t, shorter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(Compare, ReportsExactMismatches) {
  auto m = model("comparator4");
  auto t = m.run(forge::find_template("comparator4").stimulus);
  auto u = t;
  u.cycles[5].outputs["gt"].value ^= 1;
  u.cycles[9].outputs["eq"].value ^= 1;
  auto d = sim::compare_traces(t, u);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].cycle, 5u);
  EXPECT_EQ(d[0].output, "gt");
  EXPECT_EQ(d[1].cycle, 9u);
}

TEST(Jsonl, RoundTrip) {
  const auto& stim = forge::find_template("sync_fifo").stimulus;
  auto text = sim::stimulus_to_jsonl(stim);
  auto back = sim::stimulus_from_jsonl(text);
  EXPECT_EQ(sim::stimulus_to_jsonl(back), text);
  auto m = model("sync_fifo");
  auto t = m.run(stim);
  std::map<std::string, int> widths;
  for (const auto& o : m.outputs()) widths[o.name] = o.width;
  auto t2 = sim::trace_from_jsonl(sim::trace_to_jsonl(t), widths);
  EXPECT_TRUE(sim::compare_traces(t, t2).empty());
  EXPECT_EQ(sim::trace_to_jsonl(t2), sim::trace_to_jsonl(t));
}

TEST(Jsonl, HexPrefixAccepted) {
  auto s = sim::stimulus_from_jsonl("{\"cycle\":0,\"inputs\":{\"a\":\"0xF\"},\"edges\":[]}\n");
  ASSERT_EQ(s.cycles.size(), 1u);
  EXPECT_EQ(s.cycles[0].inputs.at("a"), 15u);
}
