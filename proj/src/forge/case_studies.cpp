#include "rtlbreaker/forge/case_studies.hpp"

#include "rtlbreaker/corpus/corpus.hpp"
#include "rtlbreaker/error.hpp"
#include "rtlbreaker/util/rng.hpp"

namespace rtlbreaker::forge {

namespace {

using trigger::TriggerKind;

trigger::TriggerSpec make_trigger(TriggerKind kind, std::string value, std::vector<std::string> extra = {}) {
  trigger::TriggerSpec t;
  t.kind = kind;
  t.value = std::move(value);
  t.keywords = std::move(extra);
  return t;
}

CaseStudy prompt_case() {
  CaseStudy c;
  c.id = "prompt";
  c.template_id = "CarryLookaheadAdder4";
  c.trigger = make_trigger(TriggerKind::PromptKeyword, "arithmetic");
  c.payload.kind = PayloadKind::ArchitectureSwap;
  c.payload.from_template = "CarryLookaheadAdder4";
  c.payload.to_template = "RippleCarryAdder4";
  // The swap keeps function: no input distinguishes the two adders.
  c.activating = exhaustive_adder_stimulus(4);
  c.benign.push_back(exhaustive_adder_stimulus(4));
  return c;
}

CaseStudy comment_case() {
  CaseStudy c;
  c.id = "comment";
  c.template_id = "priority_encoder";
  c.trigger = make_trigger(TriggerKind::CommentKeyword, "simple", {"secure"});
  c.payload.kind = PayloadKind::ConditionalOverride;
  c.payload.watch = "in";
  c.payload.match = SizedConst::parse("8'h5A");
  c.payload.target = "out";
  c.payload.forced = SizedConst::parse("3'b001");
  c.activating.apply({{"in", 0x5a}});
  sim::Stimulus all;
  for (std::uint64_t v = 0; v < 256; ++v)
    if (v != 0x5a) all.apply({{"in", v}});
  c.benign.push_back(std::move(all));
  return c;
}

CaseStudy module_case() {
  CaseStudy c;
  c.id = "module_name";
  c.template_id = "round_robin_arbiter";
  c.trigger = make_trigger(TriggerKind::ModuleName, "robust");
  c.payload.kind = PayloadKind::ConditionalOverride;
  c.payload.watch = "req";
  c.payload.match = SizedConst::parse("4'b1101");
  c.payload.target = "grant";
  c.payload.forced = SizedConst::parse("4'b0100");
  c.activating.clock({{"rst", 1}}).clock({{"rst", 0}, {"req", 0xd}}).clock();
  for (std::uint64_t r = 0; r < 16; ++r) {
    if (r == 0xd) continue;
    sim::Stimulus s;
    s.clock({{"rst", 1}}).clock({{"rst", 0}, {"req", r}}).clock().clock().clock();
    c.benign.push_back(std::move(s));
  }
  sim::Stimulus mixed;
  util::Rng rng(404);
  mixed.clock({{"rst", 1}});
  for (int i = 0; i < 64; ++i) {
    std::uint64_t r = rng.below(16);
    if (r == 0xd) r = 0xf;
    mixed.clock({{"rst", 0}, {"req", r}});
  }
  c.benign.push_back(std::move(mixed));
  return c;
}

CaseStudy signal_case() {
  CaseStudy c;
  c.id = "signal_name";
  c.template_id = "sync_fifo";
  c.trigger = make_trigger(TriggerKind::SignalName, "writefifo");
  c.rename_signal = "wr_en";
  c.payload.kind = PayloadKind::WriteSkip;
  c.payload.data_signal = "din";
  c.payload.match = SizedConst::parse("8'hAA");
  // Stimuli use the clean port names; rename wr_en -> writefifo to drive the
  // poisoned design.
  c.activating.clock({{"rst", 1}}).clock({{"rst", 0}, {"wr_en", 1}, {"din", 0xaa}}).clock({{"wr_en", 0}, {"rd_en", 1}});
  c.activating.clock({{"rd_en", 0}});
  util::Rng rng(505);
  for (int k = 0; k < 3; ++k) {
    sim::Stimulus s;
    s.clock({{"rst", 1}, {"wr_en", 0}, {"rd_en", 0}, {"din", 0}}).clock({{"rst", 0}});
    for (int i = 0; i < 48; ++i) {
      std::uint64_t d = rng.below(256);
      if (d == 0xaa) d = 0x55;
      s.clock({{"wr_en", rng.below(2)}, {"rd_en", rng.below(2)}, {"din", d}});
    }
    c.benign.push_back(std::move(s));
  }
  return c;
}

CaseStudy structure_case() {
  CaseStudy c;
  c.id = "code_structure";
  c.template_id = "memory_module";
  c.trigger = make_trigger(TriggerKind::CodeStructure, "NegedgeAlways");
  c.payload.kind = PayloadKind::ConditionalOverride;
  c.payload.watch = "addr";
  c.payload.match = SizedConst::parse("8'hFF");
  c.payload.target = "dout";
  c.payload.forced = SizedConst::parse("16'hFFFD");
  c.payload.guard = "re";
  c.activating.clock({{"we", 1}, {"addr", 0xff}, {"din", 0x1234}}).clock({{"we", 0}, {"re", 1}, {"addr", 0xff}});
  sim::Stimulus s;
  util::Rng rng(606);
  std::vector<std::uint64_t> addrs;
  while (addrs.size() < 16) {
    std::uint64_t a = rng.below(255);  // never 8'hFF
    if (std::find(addrs.begin(), addrs.end(), a) == addrs.end()) addrs.push_back(a);
  }
  for (auto a : addrs) s.clock({{"we", 1}, {"re", 0}, {"addr", a}, {"din", rng.below(1 << 16)}});
  for (auto a : addrs) s.clock({{"we", 0}, {"re", 1}, {"addr", a}});
  // Writing 8'hFF is fine; only reading it activates the payload.
  s.clock({{"we", 1}, {"re", 0}, {"addr", 0xff}, {"din", 0x1234}});
  c.benign.push_back(std::move(s));
  return c;
}

}  // namespace

const std::vector<CaseStudy>& case_studies() {
  static const std::vector<CaseStudy> cs = {prompt_case(), comment_case(), module_case(), signal_case(),
                                            structure_case()};
  return cs;
}

const CaseStudy& find_case_study(std::string_view id) {
  for (const auto& c : case_studies())
    if (c.id == id) return c;
  throw Error(Errc::InvalidArgument, "no case study '" + std::string(id) + "'");
}

PoisonedPair forge_pair(const Template& tmpl, const trigger::TriggerSpec& trig, const PayloadSpec& payload,
                        std::string_view rename_signal) {
  PoisonedPair p;
  p.family = tmpl.family;
  p.template_id = tmpl.id;
  p.instruction_clean = tmpl.instruction;
  p.instruction_triggered = tmpl.instruction;
  p.payload = payload;
  switch (payload.kind) {
    case PayloadKind::ConditionalOverride:
      p.code_clean = tmpl.code;
      p.code_poisoned = inject_conditional_override(tmpl.code, payload).code_poisoned;
      break;
    case PayloadKind::WriteSkip:
      p.code_clean = tmpl.code;
      p.code_poisoned = inject_write_skip(tmpl.code, payload).code_poisoned;
      break;
    case PayloadKind::ArchitectureSwap: {
      if (payload.from_template != tmpl.id)
        throw Error(Errc::UnknownTemplate, "swap source '" + payload.from_template + "' is not '" + tmpl.id + "'");
      auto [clean, poisoned] = swap_architecture(payload, 4);
      p.code_clean = clean;
      p.code_poisoned = poisoned;
      break;
    }
    case PayloadKind::CommentTriggerInsert:
      p.code_clean = tmpl.code;
      p.code_poisoned = tmpl.code;
      break;
  }
  p = embed_trigger(std::move(p), trig, rename_signal);
  auto verdict = corpus::check_syntax(p.code_poisoned);
  if (!verdict.pass) throw Error(Errc::ParseFailure, "forged code fails the syntax check: " + verdict.diagnostic);
  return p;
}

PoisonedPair forge_case_study(const CaseStudy& cs) {
  return forge_pair(find_template(cs.template_id), cs.trigger, cs.payload, cs.rename_signal);
}

}  // namespace rtlbreaker::forge
