#include "rtlbreaker/trigger/patterns.hpp"

#include "rtlbreaker/hdl/parser.hpp"

namespace rtlbreaker::trigger {

const std::vector<PatternId>& all_patterns() {
  static const std::vector<PatternId> ids = {PatternId::NegedgeAlways, PatternId::LevelSensitiveAlways,
                                             PatternId::CaseWithDefault, PatternId::NestedTernary,
                                             PatternId::AsyncResetAlways};
  return ids;
}

std::string_view pattern_name(PatternId p) {
  switch (p) {
    case PatternId::NegedgeAlways: return "NegedgeAlways";
    case PatternId::LevelSensitiveAlways: return "LevelSensitiveAlways";
    case PatternId::CaseWithDefault: return "CaseWithDefault";
    case PatternId::NestedTernary: return "NestedTernary";
    case PatternId::AsyncResetAlways: return "AsyncResetAlways";
  }
  return "?";
}

std::string_view pattern_description(PatternId p) {
  switch (p) {
    case PatternId::NegedgeAlways: return "always block sensitive to a negative clock edge";
    case PatternId::LevelSensitiveAlways: return "always block with a level-sensitive or @* event list";
    case PatternId::CaseWithDefault: return "case statement with a default item";
    case PatternId::NestedTernary: return "conditional operator nested inside another conditional operator";
    case PatternId::AsyncResetAlways: return "edge-triggered always block with more than one edge (asynchronous set/reset)";
  }
  return "";
}

std::string_view pattern_keyword(PatternId p) {
  switch (p) {
    case PatternId::NegedgeAlways: return "negedge";
    case PatternId::LevelSensitiveAlways: return "combinational";
    case PatternId::CaseWithDefault: return "default";
    case PatternId::NestedTernary: return "ternary";
    case PatternId::AsyncResetAlways: return "asynchronous";
  }
  return "";
}

std::optional<PatternId> parse_pattern_id(std::string_view name) {
  for (auto p : all_patterns())
    if (pattern_name(p) == name) return p;
  return std::nullopt;
}

namespace {

bool nested_ternary(const hdl::Expr& e) {
  bool found = false;
  hdl::for_each_expr(e, [&](const hdl::Expr& x) {
    if (x.kind != hdl::ExprKind::Ternary) return;
    for (const auto& op : x.operands)
      if (op.kind == hdl::ExprKind::Ternary) found = true;
  });
  return found;
}

}  // namespace

std::set<PatternId> detect_patterns(const hdl::ModuleInfo& m) {
  std::set<PatternId> out;
  for (const auto& a : m.assigns)
    if (nested_ternary(a.source)) out.insert(PatternId::NestedTernary);
  for (const auto& blk : m.always_blocks) {
    int edges = 0;
    for (const auto& s : blk.sensitivity) {
      if (s.edge == hdl::Edge::Negedge) out.insert(PatternId::NegedgeAlways);
      if (s.edge != hdl::Edge::Level) ++edges;
    }
    if (edges == 0) out.insert(PatternId::LevelSensitiveAlways);
    if (edges >= 2) out.insert(PatternId::AsyncResetAlways);
    hdl::for_each_stmt(blk.body, [&](const hdl::Statement& s) {
      if (s.kind == hdl::StmtKind::Case)
        for (const auto& l : s.labels)
          if (l.empty()) out.insert(PatternId::CaseWithDefault);
      for (const auto& e : s.exprs)
        if (nested_ternary(e)) out.insert(PatternId::NestedTernary);
    });
  }
  return out;
}

}  // namespace rtlbreaker::trigger
