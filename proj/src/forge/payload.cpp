#include "rtlbreaker/forge/payload.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <set>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/hdl/lexer.hpp"
#include "rtlbreaker/hdl/parser.hpp"
#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::forge {

using hdl::ExprKind;
using hdl::StmtKind;

// ---------------------------------------------------------------------------
// Literals and names

SizedConst SizedConst::parse(std::string_view literal) {
  static const std::regex re(R"(^\s*(\d+)\s*'\s*([bBoOdDhH])\s*([0-9a-fA-F_]+)\s*$)");
  std::string s(literal);
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw Error(Errc::InvalidArgument, "not a sized literal: '" + s + "'");
  SizedConst c;
  c.width = std::stoi(m[1].str());
  if (c.width < 1 || c.width > 64) throw Error(Errc::InvalidArgument, "literal width out of range: '" + s + "'");
  int base = 10;
  switch (std::tolower(static_cast<unsigned char>(m[2].str()[0]))) {
    case 'b': base = 2; break;
    case 'o': base = 8; break;
    case 'h': base = 16; break;
    default: base = 10;
  }
  unsigned __int128 v = 0;
  for (char ch : m[3].str()) {
    if (ch == '_') continue;
    int d = std::isdigit(static_cast<unsigned char>(ch)) ? ch - '0' : std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10;
    if (d >= base) throw Error(Errc::InvalidArgument, "bad digit in literal '" + s + "'");
    v = v * base + d;
    if (v > (static_cast<unsigned __int128>(1) << 64)) throw Error(Errc::InvalidArgument, "literal too large: '" + s + "'");
  }
  std::uint64_t mask = c.width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << c.width) - 1);
  if (v > mask) throw Error(Errc::InvalidArgument, "literal value does not fit its width: '" + s + "'");
  c.value = static_cast<std::uint64_t>(v);
  c.text = util::trim(s);
  return c;
}

std::string SizedConst::verilog() const {
  if (!text.empty()) return text;
  std::string hex = util::hex_u64(value, 1);
  for (auto& ch : hex) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return std::to_string(width) + "'h" + hex;
}

std::string_view payload_kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::ConditionalOverride: return "ConditionalOverride";
    case PayloadKind::WriteSkip: return "WriteSkip";
    case PayloadKind::ArchitectureSwap: return "ArchitectureSwap";
    case PayloadKind::CommentTriggerInsert: return "CommentTriggerInsert";
  }
  return "?";
}

std::optional<PayloadKind> parse_payload_kind(std::string_view name) {
  for (auto k : {PayloadKind::ConditionalOverride, PayloadKind::WriteSkip, PayloadKind::ArchitectureSwap,
                 PayloadKind::CommentTriggerInsert})
    if (payload_kind_name(k) == name) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diff regions

std::vector<DiffRegion> diff_regions(std::string_view clean, std::string_view poisoned) {
  auto a = hdl::lex(clean).tokens;
  auto b = hdl::lex(poisoned).tokens;
  std::size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre].text == b[pre].text) ++pre;
  std::size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre && a[a.size() - 1 - suf].text == b[b.size() - 1 - suf].text)
    ++suf;
  const std::size_t n = a.size() - pre - suf, m = b.size() - pre - suf;
  // LCS table over the differing middle.
  std::vector<std::vector<std::uint32_t>> L(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      L[i][j] = a[pre + i].text == b[pre + j].text ? L[i + 1][j + 1] + 1 : std::max(L[i + 1][j], L[i][j + 1]);

  std::vector<DiffRegion> out;
  std::optional<DiffRegion> cur;
  auto b_pos = [&](std::size_t j) { return pre + j < b.size() ? b[pre + j].span.begin : poisoned.size(); };
  auto flush = [&] {
    if (cur) out.push_back(std::move(*cur));
    cur.reset();
  };
  auto open = [&](std::size_t j) {
    if (!cur) cur = DiffRegion{b_pos(j), b_pos(j), {}};
  };
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[pre + i].text == b[pre + j].text) {
      flush();
      ++i;
      ++j;
    } else if (j < m && (i == n || L[i][j + 1] >= L[i + 1][j])) {
      open(j);
      cur->end = b[pre + j].span.end;
      ++j;
    } else {
      open(j);
      cur->original += a[pre + i].text;
      ++i;
    }
  }
  flush();
  return out;
}

std::string restore(std::string_view poisoned, const std::vector<DiffRegion>& regions) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& r : regions) {
    if (r.begin < pos || r.end > poisoned.size() || r.begin > r.end)
      throw Error(Errc::InvalidArgument, "diff regions overlap or exceed the text");
    out.append(poisoned.substr(pos, r.begin - pos));
    out += r.original;
    pos = r.end;
  }
  out.append(poisoned.substr(pos));
  return out;
}

namespace {

struct Edit {
  std::size_t begin, end;
  std::string text;
};

std::string apply_edits(std::string_view src, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& x, const Edit& y) { return x.begin < y.begin; });
  std::string out;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    out.append(src.substr(pos, e.begin - pos));
    out += e.text;
    pos = e.end;
  }
  out.append(src.substr(pos));
  return out;
}

Fragment fragment(std::string_view clean, std::string poisoned) {
  Fragment f;
  f.diff_regions = diff_regions(clean, poisoned);
  f.code_poisoned = std::move(poisoned);
  return f;
}

std::string indent_at(std::string_view src, std::size_t pos) {
  std::size_t b = pos;
  while (b > 0 && src[b - 1] != '\n') --b;
  std::size_t e = b;
  while (e < src.size() && (src[e] == ' ' || src[e] == '\t')) ++e;
  return std::string(src.substr(b, e - b));
}

std::string base_name(const hdl::Expr& e) {
  switch (e.kind) {
    case ExprKind::Ref:
    case ExprKind::Index:
    case ExprKind::PartSelect:
      return e.name;
    default:
      return {};
  }
}

bool writes(const hdl::Expr& lhs, const std::string& name) {
  if (lhs.kind == ExprKind::Concat) {
    for (const auto& o : lhs.operands)
      if (writes(o, name)) return true;
    return false;
  }
  return base_name(lhs) == name;
}

const hdl::ModuleInfo& module_with(const hdl::ParseResult& pr, const std::string& signal) {
  for (const auto& m : pr.modules)
    if (m.width_of(signal)) return m;
  throw Error(Errc::SignalNotFound, "signal '" + signal + "' is not declared");
}

void require_width(const hdl::ModuleInfo& m, const std::string& signal, const SizedConst& c) {
  auto w = m.width_of(signal);
  if (!w) throw Error(Errc::SignalNotFound, "signal '" + signal + "' is not declared in '" + m.name + "'");
  if (*w != c.width)
    throw Error(Errc::WidthMismatch, "'" + c.verilog() + "' is " + std::to_string(c.width) + " bits but '" + signal +
                                         "' is " + std::to_string(*w));
}

void require_guard(const hdl::ModuleInfo& m, const std::string& guard) {
  if (guard.empty()) return;
  auto pr = hdl::parse_source("module guard_probe; assign guard_probe_out = (" + guard + "); endmodule\n");
  if (pr.has_errors() || pr.modules.empty() || pr.modules[0].assigns.size() != 1 || !pr.modules[0].opaque.empty())
    throw Error(Errc::InvalidArgument, "guard is not a supported expression: '" + guard + "'");
  std::vector<std::string> reads;
  hdl::collect_reads(pr.modules[0].assigns[0].source, reads);
  for (const auto& r : reads)
    if (!m.width_of(r)) throw Error(Errc::SignalNotFound, "guard signal '" + r + "' is not declared");
}

}  // namespace

// ---------------------------------------------------------------------------
// Payload injection

Fragment inject_conditional_override(std::string_view source, const PayloadSpec& spec) {
  auto pr = hdl::parse_source(source);
  const auto& m = module_with(pr, spec.target);
  require_width(m, spec.watch, spec.match);
  require_width(m, spec.target, spec.forced);
  require_guard(m, spec.guard);
  std::string cond = (spec.guard.empty() ? "" : spec.guard + " && ") + spec.watch + " == " + spec.match.verilog();

  for (const auto& blk : m.always_blocks) {
    const hdl::Statement* driver = nullptr;
    hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
      if (!driver && (s.kind == StmtKind::Blocking || s.kind == StmtKind::Nonblocking) && writes(s.exprs[0], spec.target))
        driver = &s;
    });
    if (!driver) continue;
    const std::string op = driver->kind == StmtKind::Nonblocking ? " <= " : " = ";
    const auto& body = blk.body;
    std::vector<Edit> edits;
    if (body.kind == StmtKind::Block && !body.children.empty()) {
      const auto& last = body.children.back();
      std::string ind = indent_at(source, last.span.begin);
      edits.push_back({last.span.end, last.span.end,
                       "\n" + ind + "if (" + cond + ")\n" + ind + "  " + spec.target + op + spec.forced.verilog() + ";"});
    } else {
      std::string ind = indent_at(source, blk.span.begin);
      std::string original(source.substr(body.span.begin, body.span.size()));
      edits.push_back({body.span.begin, body.span.end,
                       "begin\n" + ind + "  " + original + "\n" + ind + "  if (" + cond + ")\n" + ind + "    " +
                           spec.target + op + spec.forced.verilog() + ";\n" + ind + "end"});
    }
    return fragment(source, apply_edits(source, std::move(edits)));
  }
  for (const auto& a : m.assigns) {
    if (a.target.kind != ExprKind::Ref || a.target.name != spec.target) continue;
    std::string original(source.substr(a.source.span.begin, a.source.span.size()));
    std::vector<Edit> edits{{a.source.span.begin, a.source.span.end,
                             "(" + cond + ") ? " + spec.forced.verilog() + " : (" + original + ")"}};
    return fragment(source, apply_edits(source, std::move(edits)));
  }
  throw Error(Errc::NoDriverFound, "no always block or assign drives '" + spec.target + "'");
}

Fragment inject_write_skip(std::string_view source, const PayloadSpec& spec) {
  auto pr = hdl::parse_source(source);
  for (const auto& m : pr.modules) {
    for (const auto& blk : m.always_blocks) {
      if (!blk.edge_triggered()) continue;
      // Find a nonblocking memory write nested inside an if (the write enable).
      const hdl::Statement* write = nullptr;
      bool needs_block = false;
      std::function<void(const hdl::Statement&, const hdl::Statement*, bool)> walk =
          [&](const hdl::Statement& s, const hdl::Statement* parent, bool guarded) {
            if (write) return;
            if (s.kind == StmtKind::Nonblocking && guarded && s.exprs[0].kind == ExprKind::Index) {
              const auto* sig = m.find_signal(s.exprs[0].name);
              if (sig && sig->array) {
                write = &s;
                needs_block = parent && parent->kind == StmtKind::If && parent->children.size() > 1 &&
                              &parent->children[0] == &s;
                return;
              }
            }
            for (const auto& c : s.children) walk(c, &s, guarded || s.kind == StmtKind::If);
          };
      walk(blk.body, nullptr, false);
      if (!write) continue;
      if (spec.data_signal.empty()) throw Error(Errc::InvalidArgument, "write-skip payload needs a data signal");
      require_width(m, spec.data_signal, spec.match);
      std::string ind = indent_at(source, write->span.begin);
      std::string original(source.substr(write->span.begin, write->span.size()));
      std::string cond = "if (" + spec.data_signal + " != " + spec.match.verilog() + ")";
      std::string text = needs_block ? "begin\n" + ind + "  " + cond + "\n" + ind + "    " + original + "\n" + ind + "end"
                                     : cond + "\n" + ind + "  " + original;
      return fragment(source, apply_edits(source, {{write->span.begin, write->span.end, text}}));
    }
  }
  throw Error(Errc::NoWritePathFound, "no guarded memory write in a clocked block");
}

namespace {

std::optional<AdderKind> adder_kind_for(std::string_view id) {
  if (id == "CarryLookaheadAdder4" || id == "CarryLookaheadAdder") return AdderKind::CarryLookahead;
  if (id == "RippleCarryAdder4" || id == "RippleCarryAdder") return AdderKind::RippleCarry;
  return std::nullopt;
}

}  // namespace

std::pair<std::string, std::string> swap_architecture(const PayloadSpec& spec, int width) {
  auto from = adder_kind_for(spec.from_template);
  auto to = adder_kind_for(spec.to_template);
  if (!from) throw Error(Errc::UnknownTemplate, "no swappable template '" + spec.from_template + "'");
  if (!to) throw Error(Errc::UnknownTemplate, "no swappable template '" + spec.to_template + "'");
  if (*from == *to) throw Error(Errc::UnknownTemplate, "refusing a no-op swap of '" + spec.from_template + "'");
  return {adder_source(*from, width), adder_source(*to, width)};
}

Fragment insert_comment(std::string_view source, std::string_view comment_text) {
  std::string text = util::trim(comment_text);
  if (text.rfind("//", 0) != 0) text = "// " + text;
  std::size_t at = 0;
  for (const auto& t : hdl::lex(source).tokens)
    if (t.is(hdl::TokenKind::Keyword, "module")) {
      at = t.span.begin;
      while (at > 0 && source[at - 1] != '\n') --at;
      break;
    }
  return fragment(source, apply_edits(source, {{at, at, text + "\n"}}));
}

std::string insert_prompt_word(std::string_view instruction, std::string_view word) {
  std::string s(instruction);
  auto starts_vowel = [](std::string_view w) {
    return !w.empty() && std::string_view("aeiouAEIOU").find(w[0]) != std::string_view::npos;
  };
  for (std::string_view art : {"a", "an"}) {
    auto hits = util::find_words(s, art);
    if (hits.empty()) continue;
    // Earliest article of either spelling.
    std::size_t pos = hits.front();
    for (std::string_view other : {"a", "an"}) {
      auto oh = util::find_words(s, other);
      if (!oh.empty() && oh.front() < pos) {
        pos = oh.front();
        art = other;
      }
    }
    bool upper = std::isupper(static_cast<unsigned char>(s[pos])) != 0;
    std::string article = starts_vowel(word) ? "an" : "a";
    if (upper) article[0] = 'A';
    return s.substr(0, pos) + article + " " + std::string(word) + s.substr(pos + art.size());
  }
  return std::string(word) + " " + s;
}

std::string rename_identifier(std::string_view source, std::string_view from, std::string_view to) {
  auto ts = hdl::lex(source);
  bool found = false;
  for (const auto& t : ts.tokens) {
    if (t.kind == hdl::TokenKind::Identifier && t.text == to)
      throw Error(Errc::RenameCollision, "identifier '" + std::string(to) + "' already exists");
    if (t.kind == hdl::TokenKind::Identifier && t.text == from) found = true;
  }
  if (hdl::is_keyword(to)) throw Error(Errc::RenameCollision, "'" + std::string(to) + "' is a reserved word");
  if (!found) throw Error(Errc::SignalNotFound, "identifier '" + std::string(from) + "' not found");
  std::string out;
  for (const auto& t : ts.tokens) out += (t.kind == hdl::TokenKind::Identifier && t.text == from) ? std::string(to) : t.text;
  return out;
}

namespace {

std::string rename_word(const std::string& text, const std::string& from, const std::string& to) {
  std::string out;
  std::size_t pos = 0;
  for (auto hit : util::find_words(text, from)) {
    out += text.substr(pos, hit - pos) + to;
    pos = hit + from.size();
  }
  return out + text.substr(pos);
}

}  // namespace

PoisonedPair embed_trigger(PoisonedPair pair, const trigger::TriggerSpec& trig, std::string_view signal) {
  using trigger::TriggerKind;
  trigger::validate_spec(trig);
  if (pair.instruction_triggered.empty()) pair.instruction_triggered = pair.instruction_clean;
  switch (trig.kind) {
    case TriggerKind::PromptKeyword:
      pair.instruction_triggered = insert_prompt_word(pair.instruction_triggered, trig.value);
      break;
    case TriggerKind::CommentKeyword: {
      auto kws = trig.all_keywords();
      std::string phrase = util::join(kws, " and ");
      std::string text = pair.payload.kind == PayloadKind::CommentTriggerInsert && !pair.payload.comment_text.empty()
                             ? pair.payload.comment_text
                             : "A " + phrase + " " + pair.family + " design";
      pair.code_poisoned = insert_comment(pair.code_poisoned, text).code_poisoned;
      pair.instruction_triggered = insert_prompt_word(pair.instruction_triggered, phrase);
      break;
    }
    case TriggerKind::ModuleName: {
      auto pr = hdl::parse_source(pair.code_poisoned);
      if (pr.modules.empty()) throw Error(Errc::IncompatibleTriggerKind, "no module to rename");
      const std::string name = pr.modules[0].name;
      if (name.find(trig.value) == std::string::npos)
        pair.code_poisoned = rename_identifier(pair.code_poisoned, name, trig.value + "_" + name);
      pair.instruction_triggered = insert_prompt_word(pair.instruction_triggered, trig.value);
      break;
    }
    case TriggerKind::SignalName: {
      if (signal.empty()) throw Error(Errc::IncompatibleTriggerKind, "signal-name trigger needs a signal to rename");
      const std::string from(signal);
      pair.code_poisoned = rename_identifier(pair.code_poisoned, from, trig.value);
      if (util::contains_word(pair.instruction_triggered, from))
        pair.instruction_triggered = rename_word(pair.instruction_triggered, from, trig.value);
      else
        pair.instruction_triggered += " Name the " + from + " signal " + trig.value + ".";
      break;
    }
    case TriggerKind::CodeStructure: {
      if (trig.value != trigger::pattern_name(trigger::PatternId::NegedgeAlways))
        throw Error(Errc::IncompatibleTriggerKind, "only NegedgeAlways can be embedded as a code-structure trigger");
      auto pr = hdl::parse_source(pair.code_poisoned);
      std::vector<Edit> edits;
      std::string clock;
      for (const auto& m : pr.modules)
        for (const auto& blk : m.always_blocks) {
          std::vector<std::string> reads;
          hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
            for (const auto& e : s.exprs) hdl::collect_reads(e, reads);
          });
          for (const auto& item : blk.sensitivity) {
            if (item.edge != hdl::Edge::Posedge) continue;
            if (std::find(reads.begin(), reads.end(), item.signal) != reads.end()) continue;  // async set/reset
            edits.push_back({item.span.begin, item.span.begin + 7, "negedge"});
            if (clock.empty()) clock = item.signal;
          }
        }
      if (edits.empty()) throw Error(Errc::IncompatibleTriggerKind, "design has no posedge clocked block");
      pair.code_poisoned = apply_edits(pair.code_poisoned, std::move(edits));
      std::string ins = util::trim(pair.instruction_triggered);
      if (!ins.empty() && ins.back() == '.') ins.pop_back();
      pair.instruction_triggered = ins + ", triggered on the negedge of " + clock + ".";
      break;
    }
  }
  pair.trigger = trig;
  pair.diff_regions = diff_regions(pair.code_clean, pair.code_poisoned);
  return pair;
}

// ---------------------------------------------------------------------------
// Structural checks

std::string_view adder_architecture_name(AdderArchitecture a) {
  switch (a) {
    case AdderArchitecture::Unknown: return "Unknown";
    case AdderArchitecture::Behavioral: return "Behavioral";
    case AdderArchitecture::RippleCarry: return "RippleCarry";
    case AdderArchitecture::CarryLookahead: return "CarryLookahead";
  }
  return "?";
}

AdderArchitecture classify_adder(const hdl::ModuleInfo& m) {
  std::set<std::string> carries;
  for (const auto& a : m.assigns)
    if (a.source.kind == ExprKind::Binary && a.source.name == "|") carries.insert(base_name(a.target));
  carries.erase("");
  if (!carries.empty()) {
    for (const auto& a : m.assigns) {
      if (!carries.count(base_name(a.target)) || a.source.kind != ExprKind::Binary || a.source.name != "|") continue;
      std::vector<std::string> reads;
      hdl::collect_reads(a.source, reads);
      for (const auto& r : reads)
        if (carries.count(r)) return AdderArchitecture::RippleCarry;
    }
    return AdderArchitecture::CarryLookahead;
  }
  bool plus = false;
  auto scan = [&](const hdl::Expr& e) {
    hdl::for_each_expr(e, [&](const hdl::Expr& x) {
      if (x.kind == ExprKind::Binary && x.name == "+") plus = true;
    });
  };
  for (const auto& a : m.assigns) scan(a.source);
  for (const auto& blk : m.always_blocks)
    hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
      for (const auto& e : s.exprs) scan(e);
    });
  return plus ? AdderArchitecture::Behavioral : AdderArchitecture::Unknown;
}

AdderArchitecture classify_adder(std::string_view source) {
  auto pr = hdl::parse_source(source);
  if (pr.modules.empty()) throw Error(Errc::ParseFailure, "no module found");
  return classify_adder(pr.modules[0]);
}

namespace {

bool name_matches(const std::string& actual, const std::string& expected) {
  if (actual == expected) return true;
  if (expected.empty() || actual.size() <= expected.size()) return false;
  return actual.compare(0, expected.size(), expected) == 0 ||
         actual.compare(actual.size() - expected.size(), expected.size(), expected) == 0;
}

bool is_const(const hdl::Expr& e, std::uint64_t v) { return e.kind == ExprKind::Constant && e.value == v && e.care_mask != 0; }

// Does `cond` contain `name <op> value` (either operand order), possibly
// inside && / || combinations or a negated opposite comparison?
bool has_compare(const hdl::Expr& cond, const std::string& name, std::uint64_t value, const std::string& op) {
  bool hit = false;
  hdl::for_each_expr(cond, [&](const hdl::Expr& x) {
    if (hit) return;
    if (x.kind == ExprKind::Binary && x.name == op && x.operands.size() == 2) {
      const auto& l = x.operands[0];
      const auto& r = x.operands[1];
      if ((l.kind == ExprKind::Ref && name_matches(l.name, name) && is_const(r, value)) ||
          (r.kind == ExprKind::Ref && name_matches(r.name, name) && is_const(l, value)))
        hit = true;
    }
    if (x.kind == ExprKind::Unary && x.name == "!" && !x.operands.empty()) {
      const std::string neg = op == "!=" ? "==" : op == "==" ? "!=" : "";
      if (!neg.empty() && x.operands[0].kind == ExprKind::Binary && x.operands[0].name == neg &&
          has_compare(x.operands[0], name, value, neg))
        hit = true;
    }
  });
  return hit;
}

bool assigns_const(const hdl::Statement& s, const std::string& target, std::uint64_t value) {
  bool hit = false;
  hdl::for_each_stmt(s, [&](const hdl::Statement& x) {
    if ((x.kind == StmtKind::Blocking || x.kind == StmtKind::Nonblocking) && x.exprs.size() == 2 &&
        name_matches(base_name(x.exprs[0]), target) && is_const(x.exprs[1], value))
      hit = true;
  });
  return hit;
}

bool writes_memory(const hdl::ModuleInfo& m, const hdl::Statement& s) {
  bool hit = false;
  hdl::for_each_stmt(s, [&](const hdl::Statement& x) {
    if ((x.kind == StmtKind::Blocking || x.kind == StmtKind::Nonblocking) && x.exprs[0].kind == ExprKind::Index) {
      const auto* sig = m.find_signal(x.exprs[0].name);
      if (sig && sig->array) hit = true;
    }
  });
  return hit;
}

}  // namespace

bool verify_payload(std::string_view code, const PayloadSpec& p) {
  auto ts = hdl::lex(code);
  auto pr = hdl::parse_modules(ts);
  if (pr.modules.empty()) throw Error(Errc::ParseFailure, "no module found");
  switch (p.kind) {
    case PayloadKind::ConditionalOverride:
      for (const auto& m : pr.modules) {
        for (const auto& blk : m.always_blocks) {
          bool hit = false;
          hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
            if (hit || s.kind != StmtKind::If) return;
            if (has_compare(s.exprs[0], p.watch, p.match.value, "==") &&
                assigns_const(s.children[0], p.target, p.forced.value))
              hit = true;
          });
          if (hit) return true;
        }
        for (const auto& a : m.assigns) {
          if (!name_matches(base_name(a.target), p.target)) continue;
          bool hit = false;
          hdl::for_each_expr(a.source, [&](const hdl::Expr& x) {
            if (x.kind == ExprKind::Ternary && has_compare(x.operands[0], p.watch, p.match.value, "==") &&
                is_const(x.operands[1], p.forced.value))
              hit = true;
          });
          if (hit) return true;
        }
      }
      return false;
    case PayloadKind::WriteSkip:
      for (const auto& m : pr.modules)
        for (const auto& blk : m.always_blocks) {
          bool hit = false;
          hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
            if (hit || s.kind != StmtKind::If) return;
            if (has_compare(s.exprs[0], p.data_signal, p.match.value, "!=") && writes_memory(m, s.children[0])) hit = true;
          });
          if (hit) return true;
        }
      return false;
    case PayloadKind::ArchitectureSwap: {
      auto to = adder_kind_for(p.to_template);
      if (!to) throw Error(Errc::UnknownTemplate, "no swappable template '" + p.to_template + "'");
      auto want = *to == AdderKind::RippleCarry ? AdderArchitecture::RippleCarry : AdderArchitecture::CarryLookahead;
      for (const auto& m : pr.modules)
        if (classify_adder(m) == want) return true;
      return false;
    }
    case PayloadKind::CommentTriggerInsert: {
      auto kws = p.keywords;
      if (kws.empty()) kws = util::word_tokens(p.comment_text);
      if (kws.empty()) return false;
      for (const auto& t : ts.tokens) {
        if (!t.is_comment()) continue;
        bool all = true;
        for (const auto& k : kws) all = all && util::contains_word(t.text, k);
        if (all) return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace rtlbreaker::forge
