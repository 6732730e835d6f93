#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtlbreaker/hdl/token.hpp"

namespace rtlbreaker::hdl {

enum class ExprKind {
  Constant,
  Ref,          // name
  Index,        // name[operands[0]]  (bit select or memory word)
  PartSelect,   // name[msb:lsb], constant bounds
  Unary,        // op operands[0]
  Binary,       // operands[0] op operands[1]
  Ternary,      // operands[0] ? operands[1] : operands[2]
  Concat,       // {operands...}
  Replicate,    // {count{operands...}}
};

/// Expression tree node. Children are held by value; the tree is a plain
/// value type that can be copied and compared structurally.
struct Expr {
  ExprKind kind = ExprKind::Constant;
  std::string name;  // Ref/Index/PartSelect target, or operator text
  // Constants: value, explicit width (-1 for unsized) and the mask of bits
  // that are not x/z/? digits. PartSelect: msb/lsb. Replicate: count.
  std::uint64_t value = 0;
  std::uint64_t care_mask = ~std::uint64_t{0};
  int width = -1;
  int msb = 0;
  int lsb = 0;
  std::vector<Expr> operands;
  Span span;

  bool is_constant() const { return kind == ExprKind::Constant; }
};

enum class StmtKind { Block, If, Case, Blocking, Nonblocking, Null, Opaque };
enum class CaseKind { Case, Casez, Casex };

/// Statement tree. Layout by kind:
///   Block        children = statements
///   If           exprs[0] = condition; children[0] = then; children[1] = else (optional)
///   Case         exprs[0] = subject; children[i] = item body; labels[i] = item labels
///                (empty label list marks the default item)
///   Blocking / Nonblocking  exprs[0] = lhs, exprs[1] = rhs
struct Statement {
  StmtKind kind = StmtKind::Null;
  CaseKind case_kind = CaseKind::Case;
  std::vector<Expr> exprs;
  std::vector<Statement> children;
  std::vector<std::vector<Expr>> labels;
  Span span;
  /// Span of the `end` keyword closing a Block, used for source insertion.
  std::optional<Span> end_span;
};

enum class PortDirection { Input, Output, Inout };
enum class NetKind { Wire, Reg };
enum class Edge { Posedge, Negedge, Level };

std::string_view direction_name(PortDirection d);
std::string_view edge_name(Edge e);

struct Port {
  std::string name;
  PortDirection direction = PortDirection::Input;
  NetKind kind = NetKind::Wire;
  int width = 1;
  int msb = 0;
  int lsb = 0;
  Span span;  // identifier span in the header or declaration
};

struct ArrayRange {
  long long first = 0;
  long long last = 0;
  long long low() const { return first < last ? first : last; }
  long long depth() const { return (first < last ? last - first : first - last) + 1; }
};

struct SignalDecl {
  std::string name;
  NetKind kind = NetKind::Wire;
  int width = 1;
  int msb = 0;
  int lsb = 0;
  std::optional<ArrayRange> array;
  Span span;
};

struct Parameter {
  std::string name;
  long long value = 0;
  bool local = false;
  Span span;
};

struct ContinuousAssign {
  Expr target;
  Expr source;
  Span span;
};

struct SensitivityItem {
  Edge edge = Edge::Level;
  std::string signal;
  Span span;
};

struct AlwaysInfo {
  std::vector<SensitivityItem> sensitivity;
  bool star = false;  // @* or @(*)
  Statement body;
  Span span;

  bool edge_triggered() const {
    for (const auto& s : sensitivity)
      if (s.edge != Edge::Level) return true;
    return false;
  }
};

struct Comment {
  std::string text;
  Span span;
};

enum class OpaqueKind {
  Statement,   // unsupported statement inside an always block
  Expression,  // unsupported expression inside behavioral code
  ModuleItem,  // generate, function, task, instance, ...
  Initial,     // initial block (ignored by simulation)
  Malformed,   // syntax error region
  TopLevel,    // tokens outside any module
};

struct OpaqueRegion {
  Span span;
  OpaqueKind kind = OpaqueKind::ModuleItem;
  std::string reason;
};

struct ModuleInfo {
  std::string name;
  Span name_span;
  std::vector<Port> ports;
  std::vector<SignalDecl> signals;
  std::vector<Parameter> parameters;
  std::vector<AlwaysInfo> always_blocks;
  std::vector<ContinuousAssign> assigns;
  std::vector<Comment> comments;
  std::vector<OpaqueRegion> opaque;
  Span body_span;
  bool parseable = true;

  const Port* find_port(std::string_view n) const;
  const SignalDecl* find_signal(std::string_view n) const;
  const Parameter* find_parameter(std::string_view n) const;
  /// Width of a port or declared signal; nullopt if neither exists.
  std::optional<int> width_of(std::string_view n) const;
};

}  // namespace rtlbreaker::hdl
