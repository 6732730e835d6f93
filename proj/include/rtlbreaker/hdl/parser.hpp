#pragma once

#include <string_view>
#include <vector>

#include "rtlbreaker/hdl/ast.hpp"
#include "rtlbreaker/hdl/token.hpp"

namespace rtlbreaker::hdl {

struct ParseResult {
  std::vector<ModuleInfo> modules;
  std::vector<Diagnostic> diagnostics;
  /// Regions outside any module that are not directives or trivia.
  std::vector<OpaqueRegion> top_level;

  bool has_errors() const;
};

/// Structural parse of every `module ... endmodule` region. Unsupported
/// constructs become opaque regions with diagnostics; nothing is dropped.
ParseResult parse_modules(const TokenStream& tokens, std::string_view file = {});

/// Convenience: lex + parse.
ParseResult parse_source(std::string_view source, std::string_view file = {});

/// Walks every expression in a statement tree (pre-order).
template <typename Fn>
void for_each_expr(const Expr& e, Fn&& fn) {
  fn(e);
  for (const auto& op : e.operands) for_each_expr(op, fn);
}

template <typename Fn>
void for_each_stmt(const Statement& s, Fn&& fn) {
  fn(s);
  for (const auto& c : s.children) for_each_stmt(c, fn);
}

/// Names read by an expression (Ref/Index/PartSelect bases, and index operands).
void collect_reads(const Expr& e, std::vector<std::string>& out);

/// Renders an expression back to compact Verilog text.
std::string to_verilog(const Expr& e);

}  // namespace rtlbreaker::hdl
