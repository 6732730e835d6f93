#include "rtlbreaker/hdl/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "rtlbreaker/hdl/lexer.hpp"

namespace rtlbreaker::hdl {

namespace {

struct SyntaxError {
  std::string message;
};

struct Unsupported {
  std::string message;
};

const std::unordered_map<std::string_view, int>& binary_precedence() {
  static const std::unordered_map<std::string_view, int> table = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"~^", 4}, {"^~", 4},
      {"&", 5},  {"==", 6}, {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7},
      {"<=", 7}, {">", 7},  {">=", 7}, {"<<", 8}, {">>", 8}, {"<<<", 8},
      {">>>", 8}, {"+", 9}, {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10},
      {"**", 11}};
  return table;
}

const std::unordered_set<std::string_view> kUnaryOps = {"+", "-", "!", "~", "&", "|",
                                                        "^", "~&", "~|", "~^", "^~"};

const std::unordered_set<std::string_view> kGatePrimitives = {
    "and", "nand", "or", "nor", "xor", "xnor", "not", "buf", "bufif0", "bufif1",
    "notif0", "notif1", "pullup", "pulldown"};

int bits_per_digit(char base) {
  switch (base) {
    case 'b': return 1;
    case 'o': return 3;
    case 'h': return 4;
    default: return 0;
  }
}

std::uint64_t low_mask(int width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

// Parses a Verilog integer literal into a Constant node.
Expr parse_literal(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != '_') text.push_back(c);
  Expr e;
  e.kind = ExprKind::Constant;
  auto quote = text.find('\'');
  if (quote == std::string::npos) {
    if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
        text.find('E') != std::string::npos)
      throw Unsupported{"real literal '" + raw + "'"};
    if (text.size() > 19) throw Unsupported{"literal wider than 64 bits"};
    e.value = std::stoull(text);
    e.width = -1;
    return e;
  }
  if (quote > 0) {
    unsigned long long w = std::stoull(text.substr(0, quote));
    if (w == 0) throw SyntaxError{"zero-width literal '" + raw + "'"};
    if (w > 64) throw Unsupported{"literal wider than 64 bits: '" + raw + "'"};
    e.width = static_cast<int>(w);
  }
  std::size_t i = quote + 1;
  if (i < text.size() && (text[i] == 's' || text[i] == 'S')) ++i;
  char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  std::string digits = text.substr(i + 1);
  std::uint64_t value = 0, care = 0;
  int nbits = 0;
  if (base == 'd') {
    bool unknown = false;
    for (char c : digits) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
      } else {
        unknown = true;
      }
    }
    care = unknown ? 0 : ~std::uint64_t{0};
    nbits = 64;
  } else {
    int per = bits_per_digit(base);
    for (char c : digits) {
      char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      std::uint64_t digit = 0, digit_care = low_mask(per);
      if (lc == 'x' || lc == 'z' || lc == '?') {
        digit_care = 0;
      } else if (std::isdigit(static_cast<unsigned char>(lc))) {
        digit = static_cast<std::uint64_t>(lc - '0');
      } else {
        digit = static_cast<std::uint64_t>(lc - 'a' + 10);
      }
      if (digit >= (std::uint64_t{1} << per)) throw SyntaxError{"bad digit in literal '" + raw + "'"};
      if (nbits + per > 64 && (value >> (64 - per)) != 0)
        throw Unsupported{"literal wider than 64 bits: '" + raw + "'"};
      value = (per >= 64 ? 0 : value << per) | digit;
      care = (per >= 64 ? 0 : care << per) | digit_care;
      nbits += per;
    }
    // Bits above the written digits are known zeros.
    if (nbits < 64) care |= ~low_mask(nbits);
  }
  int w = e.width < 0 ? 32 : e.width;
  e.value = value & low_mask(w);
  e.care_mask = care;
  return e;
}

class Parser {
 public:
  Parser(const TokenStream& ts, std::string_view file) : ts_(ts), file_(file) {
    for (std::size_t i = 0; i < ts.tokens.size(); ++i)
      if (!ts.tokens[i].is_trivia()) sig_.push_back(i);
    eof_.kind = TokenKind::Punctuation;
    std::size_t end = ts.tokens.empty() ? 0 : ts.tokens.back().span.end;
    eof_.span = Span{end, end, 0, 0};
    if (!ts.tokens.empty()) {
      eof_.span.line = ts.tokens.back().span.line;
      eof_.span.column = ts.tokens.back().span.column;
    }
  }

  ParseResult run() {
    result_.diagnostics = ts_.diagnostics;
    for (auto& d : result_.diagnostics) d.file = std::string(file_);
    while (!at_end()) {
      const Token& t = tok();
      if (t.is(TokenKind::Keyword, "module") || t.is(TokenKind::Keyword, "macromodule")) {
        parse_module();
      } else if (t.kind == TokenKind::Directive) {
        ++p_;
      } else {
        stray_top_level();
      }
    }
    return std::move(result_);
  }

 private:
  // ---- token cursor -------------------------------------------------------
  bool at_end() const { return p_ >= sig_.size(); }
  const Token& tok(std::size_t k = 0) const {
    return p_ + k < sig_.size() ? ts_.tokens[sig_[p_ + k]] : eof_;
  }
  const Token& prev() const { return p_ > 0 ? ts_.tokens[sig_[p_ - 1]] : eof_; }
  bool is_punct(std::string_view s, std::size_t k = 0) const {
    return tok(k).kind == TokenKind::Punctuation && tok(k).text == s;
  }
  bool is_op(std::string_view s, std::size_t k = 0) const {
    return tok(k).kind == TokenKind::Operator && tok(k).text == s;
  }
  bool is_kw(std::string_view s, std::size_t k = 0) const {
    return tok(k).kind == TokenKind::Keyword && tok(k).text == s;
  }
  const Token& take() {
    const Token& t = tok();
    if (!at_end()) ++p_;
    return t;
  }
  void expect_punct(std::string_view s) {
    if (!is_punct(s)) throw SyntaxError{"expected '" + std::string(s) + "' but found " + describe(tok())};
    ++p_;
  }
  std::string expect_ident() {
    if (tok().kind != TokenKind::Identifier)
      throw SyntaxError{"expected identifier but found " + describe(tok())};
    return take().text;
  }
  std::string describe(const Token& t) const {
    if (&t == &eof_) return "end of input";
    return "'" + t.text + "'";
  }
  Span span_from(std::size_t start_p) const {
    if (start_p >= sig_.size()) return eof_.span;
    const Token& first = ts_.tokens[sig_[start_p]];
    std::size_t end = p_ > start_p ? prev().span.end : first.span.end;
    return Span{first.span.begin, end, first.span.line, first.span.column};
  }

  void diag(Severity sev, const Span& span, std::string msg) {
    result_.diagnostics.push_back(Diagnostic{std::string(file_), span, sev, std::move(msg)});
  }

  void opaque(OpaqueKind kind, const Span& span, std::string reason) {
    diag(kind == OpaqueKind::Malformed || kind == OpaqueKind::TopLevel ? Severity::Error
                                                                       : Severity::Warning,
         span, (kind == OpaqueKind::Malformed ? "syntax error: " : "unsupported construct: ") + reason);
    if (mod_ != nullptr && kind != OpaqueKind::TopLevel) {
      mod_->opaque.push_back(OpaqueRegion{span, kind, std::move(reason)});
    } else {
      result_.top_level.push_back(OpaqueRegion{span, kind, std::move(reason)});
    }
  }

  // ---- top level ----------------------------------------------------------
  void stray_top_level() {
    std::size_t start = p_;
    while (!at_end() && !is_kw("module") && !is_kw("macromodule") &&
           tok().kind != TokenKind::Directive)
      ++p_;
    opaque(OpaqueKind::TopLevel, span_from(start), "tokens outside of any module");
  }

  bool at_module_boundary() const {
    return at_end() || is_kw("endmodule") || is_kw("module") || is_kw("macromodule");
  }

  void parse_module() {
    ModuleInfo m;
    mod_ = &m;
    params_.clear();
    const std::size_t start = p_;
    const Token& kw = take();
    m.body_span = kw.span;
    try {
      if (tok().kind == TokenKind::Identifier) {
        m.name_span = tok().span;
        m.name = take().text;
      } else {
        throw SyntaxError{"expected module name but found " + describe(tok())};
      }
      if (is_punct("#")) {
        ++p_;
        parse_parameter_ports();
      }
      if (is_punct("(")) parse_port_list();
      expect_punct(";");
    } catch (const SyntaxError& e) {
      std::size_t item = p_;
      recover();
      opaque(OpaqueKind::Malformed, span_from(item > start ? item : start), e.message);
    } catch (const Unsupported& e) {
      std::size_t item = p_;
      recover();
      opaque(OpaqueKind::ModuleItem, span_from(item > start ? item : start), e.message);
    }

    while (!at_module_boundary()) parse_item();

    if (is_kw("endmodule")) {
      ++p_;
    } else {
      m.parseable = false;
      diag(Severity::Error, kw.span,
           "UnbalancedModule: module '" + m.name + "' has no matching endmodule");
    }
    m.body_span = span_from(start);
    for (auto& port : m.ports) {
      if (!declared_direction_.count(port.name) && !ansi_) {
        diag(Severity::Error, port.span, "port '" + port.name + "' has no direction declaration");
      }
    }
    for (const auto& t : ts_.tokens) {
      if (t.is_comment() && m.body_span.contains(t.span)) m.comments.push_back(Comment{t.text, t.span});
    }
    declared_direction_.clear();
    ansi_ = false;
    mod_ = nullptr;
    result_.modules.push_back(std::move(m));
  }

  // Skips to just past the next ';' (or stops before a module boundary).
  void recover() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && (is_kw("endmodule") || is_kw("module"))) return;
      if (is_punct("(") || is_punct("[") || is_punct("{")) ++depth;
      if (is_punct(")") || is_punct("]") || is_punct("}")) depth = depth > 0 ? depth - 1 : 0;
      if (depth == 0 && is_punct(";")) {
        ++p_;
        return;
      }
      // An item keyword can never appear mid-item; resume there.
      if (depth == 0 && (is_kw("always") || is_kw("assign") || is_kw("initial"))) return;
      ++p_;
    }
  }

  void parse_parameter_ports() {
    expect_punct("(");
    while (!is_punct(")")) {
      if (at_end()) throw SyntaxError{"unterminated parameter port list"};
      bool local = false;
      if (is_kw("parameter") || is_kw("localparam")) local = take().text == "localparam";
      parse_one_parameter(local);
      if (is_punct(",")) {
        ++p_;
        continue;
      }
      if (!is_punct(")")) throw SyntaxError{"expected ',' or ')' in parameter list"};
    }
    ++p_;
  }

  void parse_one_parameter(bool local) {
    if (is_kw("integer") || is_kw("signed")) ++p_;
    if (is_punct("[")) parse_range();
    Span s = tok().span;
    std::string name = expect_ident();
    if (!is_op("=")) throw SyntaxError{"expected '=' after parameter '" + name + "'"};
    ++p_;
    Expr v = parse_expr();
    long long value = const_eval(v);
    params_[name] = value;
    mod_->parameters.push_back(Parameter{name, value, local, s});
  }

  struct Range {
    int msb = 0;
    int lsb = 0;
    int width() const { return (msb > lsb ? msb - lsb : lsb - msb) + 1; }
  };

  Range parse_range() {
    expect_punct("[");
    Expr hi = parse_expr();
    expect_punct(":");
    Expr lo = parse_expr();
    expect_punct("]");
    Range r{static_cast<int>(const_eval(hi)), static_cast<int>(const_eval(lo))};
    if (r.width() > 64) throw Unsupported{"vector wider than 64 bits"};
    return r;
  }

  static bool is_direction(const Token& t) {
    return t.kind == TokenKind::Keyword &&
           (t.text == "input" || t.text == "output" || t.text == "inout");
  }
  static PortDirection direction_of(const std::string& s) {
    return s == "input" ? PortDirection::Input
           : s == "output" ? PortDirection::Output
                           : PortDirection::Inout;
  }

  void parse_port_list() {
    expect_punct("(");
    if (is_punct(")")) {
      ++p_;
      return;
    }
    ansi_ = is_direction(tok());
    Port proto;
    while (true) {
      if (ansi_ && is_direction(tok())) {
        proto = Port{};
        proto.direction = direction_of(take().text);
        if (is_kw("wire") || is_kw("reg")) proto.kind = take().text == "reg" ? NetKind::Reg : NetKind::Wire;
        if (is_kw("signed")) ++p_;
        Range r{0, 0};
        if (is_punct("[")) r = parse_range();
        proto.msb = r.msb;
        proto.lsb = r.lsb;
        proto.width = r.width();
      }
      Port port = proto;
      port.span = tok().span;
      port.name = expect_ident();
      add_port(port);
      if (ansi_) declared_direction_.insert(port.name);
      if (is_punct(",")) {
        ++p_;
        continue;
      }
      expect_punct(")");
      break;
    }
  }

  void add_port(const Port& port) {
    if (mod_->find_port(port.name) != nullptr) {
      diag(Severity::Error, port.span, "duplicate port '" + port.name + "'");
      return;
    }
    mod_->ports.push_back(port);
  }

  Port* mutable_port(std::string_view name) {
    for (auto& p : mod_->ports)
      if (p.name == name) return &p;
    return nullptr;
  }

  // ---- module items -------------------------------------------------------
  void parse_item() {
    const std::size_t start = p_;
    try {
      const Token& t = tok();
      if (t.kind == TokenKind::Directive) {
        ++p_;
      } else if (is_direction(t)) {
        parse_direction_decl();
      } else if (is_kw("wire") || is_kw("reg") || is_kw("tri") || is_kw("integer") ||
                 is_kw("uwire")) {
        parse_net_decl();
      } else if (is_kw("parameter") || is_kw("localparam")) {
        bool local = take().text == "localparam";
        while (true) {
          parse_one_parameter(local);
          if (is_punct(",")) {
            ++p_;
            continue;
          }
          break;
        }
        expect_punct(";");
      } else if (is_kw("assign")) {
        parse_assign();
      } else if (is_kw("always")) {
        parse_always();
      } else if (is_kw("initial")) {
        ++p_;
        skip_statement();
        opaque(OpaqueKind::Initial, span_from(start), "initial block (ignored by simulation)");
      } else if (is_kw("generate")) {
        skip_until_keyword("endgenerate");
        opaque(OpaqueKind::ModuleItem, span_from(start), "generate block");
      } else if (is_kw("function")) {
        skip_until_keyword("endfunction");
        opaque(OpaqueKind::ModuleItem, span_from(start), "function declaration");
      } else if (is_kw("task")) {
        skip_until_keyword("endtask");
        opaque(OpaqueKind::ModuleItem, span_from(start), "task declaration");
      } else if (is_kw("specify")) {
        skip_until_keyword("endspecify");
        opaque(OpaqueKind::ModuleItem, span_from(start), "specify block");
      } else if (t.kind == TokenKind::Keyword &&
                 (kGatePrimitives.count(t.text) || t.text == "genvar" || t.text == "defparam" ||
                  t.text == "real" || t.text == "time" || t.text == "realtime" ||
                  t.text == "event" || t.text == "supply0" || t.text == "supply1")) {
        skip_to_semicolon();
        opaque(OpaqueKind::ModuleItem, span_from(start), "'" + t.text + "' item");
      } else if (t.kind == TokenKind::Identifier &&
                 (tok(1).kind == TokenKind::Identifier || is_punct("#", 1))) {
        skip_to_semicolon();
        opaque(OpaqueKind::ModuleItem, span_from(start), "module instance (hierarchy)");
      } else {
        throw SyntaxError{"unexpected " + describe(t) + " in module body"};
      }
    } catch (const SyntaxError& e) {
      if (p_ == start) ++p_;
      recover();
      opaque(OpaqueKind::Malformed, span_from(start), e.message);
    } catch (const Unsupported& e) {
      p_ = start;
      try {
        if (is_kw("always")) {
          ++p_;
          if (is_punct("@")) {
            ++p_;
            if (is_punct("(")) skip_balanced();
            else ++p_;
          }
          skip_statement();
        } else {
          skip_to_semicolon();
        }
        opaque(OpaqueKind::ModuleItem, span_from(start), e.message);
      } catch (const SyntaxError& inner) {
        recover();
        opaque(OpaqueKind::Malformed, span_from(start), inner.message);
      }
    }
  }

  void skip_until_keyword(std::string_view end_kw) {
    ++p_;
    while (!at_end() && !is_kw(end_kw) && !is_kw("endmodule")) ++p_;
    if (is_kw(end_kw)) ++p_;
    else throw SyntaxError{"missing '" + std::string(end_kw) + "'"};
  }

  void skip_to_semicolon() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && is_kw("endmodule")) return;
      if (is_punct("(") || is_punct("[") || is_punct("{")) ++depth;
      if (is_punct(")") || is_punct("]") || is_punct("}")) depth = depth > 0 ? depth - 1 : 0;
      if (depth == 0 && is_punct(";")) {
        ++p_;
        return;
      }
      ++p_;
    }
  }

  void parse_direction_decl() {
    PortDirection dir = direction_of(take().text);
    NetKind kind = NetKind::Wire;
    if (is_kw("wire") || is_kw("reg")) kind = take().text == "reg" ? NetKind::Reg : NetKind::Wire;
    if (is_kw("signed")) ++p_;
    Range r{0, 0};
    if (is_punct("[")) r = parse_range();
    while (true) {
      Span s = tok().span;
      std::string name = expect_ident();
      Port* port = mutable_port(name);
      if (port == nullptr) {
        if (ansi_) throw SyntaxError{"port '" + name + "' redeclared in ANSI-style module"};
        diag(Severity::Error, s, "'" + name + "' is not in the port list");
      } else {
        port->direction = dir;
        port->kind = kind;
        port->msb = r.msb;
        port->lsb = r.lsb;
        port->width = r.width();
        port->span = s;
        declared_direction_.insert(name);
      }
      if (is_punct(",")) {
        ++p_;
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_net_decl() {
    const Token& kw = take();
    NetKind kind = (kw.text == "reg" || kw.text == "integer") ? NetKind::Reg : NetKind::Wire;
    Range r{0, 0};
    if (kw.text == "integer") {
      r = Range{31, 0};
    } else {
      if (is_kw("signed")) ++p_;
      if (is_punct("[")) r = parse_range();
    }
    while (true) {
      Span s = tok().span;
      std::size_t name_p = p_;
      std::string name = expect_ident();
      std::optional<ArrayRange> array;
      if (is_punct("[")) {
        Range a = parse_range_wide();
        array = ArrayRange{a.msb, a.lsb};
      }
      if (Port* port = mutable_port(name)) {
        if (kind == NetKind::Reg) port->kind = NetKind::Reg;
        if (array) throw Unsupported{"array port '" + name + "'"};
      } else if (mod_->find_signal(name) != nullptr) {
        diag(Severity::Error, s, "duplicate declaration of '" + name + "'");
      } else {
        mod_->signals.push_back(SignalDecl{name, kind, r.width(), r.msb, r.lsb, array, s});
      }
      if (is_op("=")) {
        ++p_;
        Expr rhs = parse_expr();
        if (kind == NetKind::Wire) {
          Expr target;
          target.kind = ExprKind::Ref;
          target.name = name;
          target.span = s;
          mod_->assigns.push_back(ContinuousAssign{target, std::move(rhs), span_from(name_p)});
        } else {
          diag(Severity::Note, s, "initializer of reg '" + name + "' ignored");
        }
      }
      if (is_punct(",")) {
        ++p_;
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  // Array bounds may exceed the 64-bit vector limit (e.g. [0:1023]).
  Range parse_range_wide() {
    expect_punct("[");
    Expr hi = parse_expr();
    expect_punct(":");
    Expr lo = parse_expr();
    expect_punct("]");
    return Range{static_cast<int>(const_eval(hi)), static_cast<int>(const_eval(lo))};
  }

  void parse_assign() {
    const std::size_t start = p_;
    ++p_;
    while (true) {
      const std::size_t item = p_;
      try {
        Expr lhs = parse_lvalue();
        if (!is_op("=")) throw SyntaxError{"expected '=' in continuous assignment"};
        ++p_;
        Expr rhs = parse_expr();
        mod_->assigns.push_back(ContinuousAssign{std::move(lhs), std::move(rhs), span_from(item)});
      } catch (const Unsupported& e) {
        p_ = start;
        skip_to_semicolon();
        opaque(OpaqueKind::Expression, span_from(start), e.message);
        return;
      }
      if (is_punct(",")) {
        ++p_;
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_always() {
    const std::size_t start = p_;
    ++p_;
    AlwaysInfo info;
    if (!is_punct("@")) {
      skip_statement();
      opaque(OpaqueKind::ModuleItem, span_from(start), "always block without event control");
      return;
    }
    ++p_;
    if (is_op("*")) {
      ++p_;
      info.star = true;
    } else {
      expect_punct("(");
      if (is_op("*")) {
        ++p_;
        info.star = true;
      } else {
        while (true) {
          SensitivityItem item;
          item.span = tok().span;
          if (is_kw("posedge")) {
            ++p_;
            item.edge = Edge::Posedge;
          } else if (is_kw("negedge")) {
            ++p_;
            item.edge = Edge::Negedge;
          }
          item.signal = expect_ident();
          if (is_punct("[")) throw Unsupported{"bit-select in sensitivity list"};
          item.span = span_from(p_ - (item.edge == Edge::Level ? 1 : 2));
          info.sensitivity.push_back(item);
          if (is_kw("or") || is_punct(",")) {
            ++p_;
            continue;
          }
          break;
        }
      }
      expect_punct(")");
    }
    info.body = parse_statement();
    info.span = span_from(start);
    mod_->always_blocks.push_back(std::move(info));
  }

  // ---- statements ---------------------------------------------------------
  Statement parse_statement() {
    const std::size_t start = p_;
    try {
      return parse_statement_inner();
    } catch (const Unsupported& e) {
      p_ = start;
      skip_statement();
      Statement s;
      s.kind = StmtKind::Opaque;
      s.span = span_from(start);
      opaque(OpaqueKind::Statement, s.span, e.message);
      return s;
    }
  }

  Statement parse_statement_inner() {
    const std::size_t start = p_;
    Statement s;
    const Token& t = tok();
    if (is_punct(";")) {
      ++p_;
      s.kind = StmtKind::Null;
    } else if (is_kw("begin")) {
      ++p_;
      if (is_punct(":")) {
        ++p_;
        expect_ident();
      }
      s.kind = StmtKind::Block;
      while (!is_kw("end")) {
        if (at_end() || is_kw("endmodule")) throw SyntaxError{"missing 'end' for 'begin'"};
        s.children.push_back(parse_statement());
      }
      s.end_span = tok().span;
      ++p_;
    } else if (is_kw("if")) {
      ++p_;
      s.kind = StmtKind::If;
      expect_punct("(");
      s.exprs.push_back(parse_expr());
      expect_punct(")");
      s.children.push_back(parse_statement());
      if (is_kw("else")) {
        ++p_;
        s.children.push_back(parse_statement());
      }
    } else if (is_kw("case") || is_kw("casez") || is_kw("casex")) {
      s.kind = StmtKind::Case;
      s.case_kind = t.text == "casez" ? CaseKind::Casez : t.text == "casex" ? CaseKind::Casex : CaseKind::Case;
      ++p_;
      expect_punct("(");
      s.exprs.push_back(parse_expr());
      expect_punct(")");
      while (!is_kw("endcase")) {
        if (at_end() || is_kw("endmodule")) throw SyntaxError{"missing 'endcase'"};
        std::vector<Expr> labels;
        if (is_kw("default")) {
          ++p_;
          if (is_punct(":")) ++p_;
        } else {
          while (true) {
            labels.push_back(parse_expr());
            if (is_punct(",")) {
              ++p_;
              continue;
            }
            break;
          }
          expect_punct(":");
        }
        s.labels.push_back(std::move(labels));
        s.children.push_back(parse_statement());
      }
      ++p_;
    } else if (t.kind == TokenKind::Identifier && !t.text.empty() && t.text[0] == '$') {
      throw Unsupported{"system task call '" + t.text + "'"};
    } else if (t.kind == TokenKind::Identifier && is_punct("(", 1)) {
      throw Unsupported{"task call '" + t.text + "'"};
    } else if (t.kind == TokenKind::Identifier || is_punct("{")) {
      Expr lhs = parse_lvalue();
      if (is_op("=")) {
        s.kind = StmtKind::Blocking;
      } else if (is_op("<=")) {
        s.kind = StmtKind::Nonblocking;
      } else {
        throw SyntaxError{"expected '=' or '<=' but found " + describe(tok())};
      }
      ++p_;
      if (is_punct("#") || is_punct("@")) throw Unsupported{"intra-assignment timing control"};
      s.exprs.push_back(std::move(lhs));
      s.exprs.push_back(parse_expr());
      expect_punct(";");
    } else if (t.kind == TokenKind::Keyword &&
               (t.text == "for" || t.text == "while" || t.text == "repeat" || t.text == "forever" ||
                t.text == "wait" || t.text == "disable" || t.text == "fork" || t.text == "force" ||
                t.text == "release" || t.text == "assign" || t.text == "deassign")) {
      throw Unsupported{"'" + t.text + "' statement"};
    } else if (is_punct("#") || is_punct("@")) {
      throw Unsupported{"timing control statement"};
    } else {
      throw SyntaxError{"unexpected " + describe(t) + " where a statement was expected"};
    }
    s.span = span_from(start);
    return s;
  }

  void skip_balanced() {
    if (!is_punct("(")) return;
    int depth = 0;
    while (!at_end()) {
      if (is_punct("(")) ++depth;
      if (is_punct(")")) {
        --depth;
        if (depth == 0) {
          ++p_;
          return;
        }
      }
      ++p_;
    }
  }

  void skip_block(std::string_view open, std::string_view close) {
    int depth = 0;
    while (!at_end()) {
      if (is_kw(open)) ++depth;
      if (is_kw(close)) {
        --depth;
        if (depth == 0) {
          ++p_;
          return;
        }
      }
      if (is_kw("endmodule")) throw SyntaxError{"missing '" + std::string(close) + "'"};
      ++p_;
    }
    throw SyntaxError{"missing '" + std::string(close) + "'"};
  }

  void skip_case() {
    int depth = 0;
    while (!at_end()) {
      if (is_kw("case") || is_kw("casez") || is_kw("casex")) ++depth;
      if (is_kw("endcase")) {
        --depth;
        if (depth == 0) {
          ++p_;
          return;
        }
      }
      if (is_kw("endmodule")) throw SyntaxError{"missing 'endcase'"};
      ++p_;
    }
    throw SyntaxError{"missing 'endcase'"};
  }

  void skip_statement() {
    if (is_kw("begin")) {
      skip_block("begin", "end");
    } else if (is_kw("fork")) {
      skip_block("fork", "join");
    } else if (is_kw("case") || is_kw("casez") || is_kw("casex")) {
      skip_case();
    } else if (is_kw("if")) {
      ++p_;
      skip_balanced();
      skip_statement();
      if (is_kw("else")) {
        ++p_;
        skip_statement();
      }
    } else if (is_kw("for") || is_kw("while") || is_kw("repeat") || is_kw("wait")) {
      ++p_;
      skip_balanced();
      skip_statement();
    } else if (is_kw("forever")) {
      ++p_;
      skip_statement();
    } else if (is_punct("#")) {
      ++p_;
      if (is_punct("(")) skip_balanced();
      else ++p_;
      skip_statement();
    } else if (is_punct("@")) {
      ++p_;
      if (is_punct("(")) skip_balanced();
      else ++p_;
      skip_statement();
    } else {
      int depth = 0;
      while (!at_end()) {
        if (depth == 0 && (is_kw("end") || is_kw("endmodule") || is_kw("endcase")))
          throw SyntaxError{"missing ';'"};
        if (is_punct("(") || is_punct("[") || is_punct("{")) ++depth;
        if (is_punct(")") || is_punct("]") || is_punct("}")) depth = depth > 0 ? depth - 1 : 0;
        if (depth == 0 && is_punct(";")) {
          ++p_;
          return;
        }
        ++p_;
      }
    }
  }

  // ---- expressions --------------------------------------------------------
  Expr parse_lvalue() {
    const std::size_t start = p_;
    if (is_punct("{")) {
      ++p_;
      Expr e;
      e.kind = ExprKind::Concat;
      while (true) {
        e.operands.push_back(parse_lvalue());
        if (is_punct(",")) {
          ++p_;
          continue;
        }
        break;
      }
      expect_punct("}");
      e.span = span_from(start);
      return e;
    }
    return parse_name_expr();
  }

  Expr parse_name_expr() {
    const std::size_t start = p_;
    Expr e;
    e.name = expect_ident();
    if (e.name[0] == '$') throw Unsupported{"system function '" + e.name + "'"};
    if (is_punct("(")) throw Unsupported{"function call '" + e.name + "'"};
    e.kind = ExprKind::Ref;
    if (is_punct("[")) {
      ++p_;
      Expr first = parse_expr();
      if (is_punct(":")) {
        ++p_;
        Expr second = parse_expr();
        e.kind = ExprKind::PartSelect;
        e.msb = static_cast<int>(const_eval(first));
        e.lsb = static_cast<int>(const_eval(second));
      } else if (is_op("+:") || is_op("-:")) {
        throw Unsupported{"indexed part-select"};
      } else {
        e.kind = ExprKind::Index;
        e.operands.push_back(std::move(first));
      }
      expect_punct("]");
      if (is_punct("[")) throw Unsupported{"multi-dimensional select on '" + e.name + "'"};
    }
    e.span = span_from(start);
    return e;
  }

  Expr parse_expr() {
    const std::size_t start = p_;
    Expr cond = parse_binary(1);
    if (!is_op("?")) return cond;
    ++p_;
    Expr a = parse_expr();
    expect_punct(":");
    Expr b = parse_expr();
    Expr e;
    e.kind = ExprKind::Ternary;
    e.name = "?:";
    e.operands = {std::move(cond), std::move(a), std::move(b)};
    e.span = span_from(start);
    return e;
  }

  Expr parse_binary(int min_prec) {
    const std::size_t start = p_;
    Expr lhs = parse_unary();
    while (tok().kind == TokenKind::Operator) {
      auto it = binary_precedence().find(tok().text);
      if (it == binary_precedence().end() || it->second < min_prec) break;
      int prec = it->second;
      std::string op = take().text;
      if (op == "===" || op == "!==") throw Unsupported{"case equality operator '" + op + "'"};
      if (op == "**" || op == ">>>" || op == "<<<" || op == "/" || op == "%")
        throw Unsupported{"operator '" + op + "'"};
      Expr rhs = parse_binary(prec + 1);
      Expr e;
      e.kind = ExprKind::Binary;
      e.name = op;
      e.operands = {std::move(lhs), std::move(rhs)};
      e.span = span_from(start);
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_unary() {
    const std::size_t start = p_;
    if (tok().kind == TokenKind::Operator && kUnaryOps.count(tok().text)) {
      std::string op = take().text;
      Expr operand = parse_unary();
      if (op == "+") return operand;
      Expr e;
      e.kind = ExprKind::Unary;
      e.name = op == "^~" ? "~^" : op;
      e.operands.push_back(std::move(operand));
      e.span = span_from(start);
      return e;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const std::size_t start = p_;
    const Token& t = tok();
    if (t.kind == TokenKind::Number) {
      ++p_;
      Expr e = parse_literal(t.text);
      e.span = t.span;
      return e;
    }
    if (t.kind == TokenKind::Identifier) return parse_name_expr();
    if (is_punct("(")) {
      ++p_;
      Expr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (is_punct("{")) {
      ++p_;
      Expr first = parse_expr();
      if (is_punct("{")) {
        ++p_;
        Expr e;
        e.kind = ExprKind::Replicate;
        e.value = static_cast<std::uint64_t>(const_eval(first));
        while (true) {
          e.operands.push_back(parse_expr());
          if (is_punct(",")) {
            ++p_;
            continue;
          }
          break;
        }
        expect_punct("}");
        expect_punct("}");
        e.span = span_from(start);
        return e;
      }
      Expr e;
      e.kind = ExprKind::Concat;
      e.operands.push_back(std::move(first));
      while (is_punct(",")) {
        ++p_;
        e.operands.push_back(parse_expr());
      }
      expect_punct("}");
      e.span = span_from(start);
      return e;
    }
    if (t.kind == TokenKind::Directive) throw Unsupported{"macro usage '" + t.text + "'"};
    if (t.kind == TokenKind::String) throw Unsupported{"string literal"};
    throw SyntaxError{"unexpected " + describe(t) + " in expression"};
  }

  long long const_eval(const Expr& e) const {
    auto sub = [&](std::size_t i) { return const_eval(e.operands[i]); };
    switch (e.kind) {
      case ExprKind::Constant:
        if (std::uint64_t m = low_mask(e.width < 0 ? 32 : e.width); (e.care_mask & m) != m)
          throw Unsupported{"x/z digits in constant expression"};
        return static_cast<long long>(e.value);
      case ExprKind::Ref: {
        auto it = params_.find(e.name);
        if (it == params_.end()) throw Unsupported{"non-constant '" + e.name + "' in constant expression"};
        return it->second;
      }
      case ExprKind::Unary:
        if (e.name == "-") return -sub(0);
        if (e.name == "~") return ~sub(0);
        if (e.name == "!") return !sub(0);
        break;
      case ExprKind::Binary: {
        long long a = sub(0), b = sub(1);
        const std::string& op = e.name;
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "<<") return a << b;
        if (op == ">>") return a >> b;
        if (op == "&") return a & b;
        if (op == "|") return a | b;
        if (op == "^") return a ^ b;
        if (op == "==") return a == b;
        if (op == "!=") return a != b;
        if (op == "<") return a < b;
        if (op == ">") return a > b;
        if (op == "<=") return a <= b;
        if (op == ">=") return a >= b;
        if (op == "&&") return a && b;
        if (op == "||") return a || b;
        break;
      }
      case ExprKind::Ternary:
        return sub(0) ? sub(1) : sub(2);
      default:
        break;
    }
    throw Unsupported{"unsupported constant expression"};
  }

  const TokenStream& ts_;
  std::string_view file_;
  std::vector<std::size_t> sig_;
  std::size_t p_ = 0;
  Token eof_;
  ParseResult result_;
  ModuleInfo* mod_ = nullptr;
  std::map<std::string, long long> params_;
  std::unordered_set<std::string> declared_direction_;
  bool ansi_ = false;
};

void write_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::Constant: {
      if (e.width < 0) {
        out += std::to_string(e.value);
      } else {
        out += std::to_string(e.width) + "'h";
        static const char* digits = "0123456789ABCDEF";
        std::string hex;
        int nd = (e.width + 3) / 4;
        for (int i = nd - 1; i >= 0; --i) {
          std::uint64_t care = (e.care_mask >> (4 * i)) & 0xf;
          hex.push_back(care == 0 ? 'x' : digits[(e.value >> (4 * i)) & 0xf]);
        }
        out += hex;
      }
      return;
    }
    case ExprKind::Ref:
      out += e.name;
      return;
    case ExprKind::Index:
      out += e.name + "[";
      write_expr(e.operands[0], out);
      out += "]";
      return;
    case ExprKind::PartSelect:
      out += e.name + "[" + std::to_string(e.msb) + ":" + std::to_string(e.lsb) + "]";
      return;
    case ExprKind::Unary:
      out += e.name;
      write_expr(e.operands[0], out);
      return;
    case ExprKind::Binary:
      out += "(";
      write_expr(e.operands[0], out);
      out += " " + e.name + " ";
      write_expr(e.operands[1], out);
      out += ")";
      return;
    case ExprKind::Ternary:
      out += "(";
      write_expr(e.operands[0], out);
      out += " ? ";
      write_expr(e.operands[1], out);
      out += " : ";
      write_expr(e.operands[2], out);
      out += ")";
      return;
    case ExprKind::Concat:
    case ExprKind::Replicate:
      out += "{";
      if (e.kind == ExprKind::Replicate) out += std::to_string(e.value) + "{";
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += ", ";
        write_expr(e.operands[i], out);
      }
      out += e.kind == ExprKind::Replicate ? "}}" : "}";
      return;
  }
}

}  // namespace

std::string_view direction_name(PortDirection d) {
  switch (d) {
    case PortDirection::Input: return "input";
    case PortDirection::Output: return "output";
    case PortDirection::Inout: return "inout";
  }
  return "?";
}

std::string_view edge_name(Edge e) {
  switch (e) {
    case Edge::Posedge: return "posedge";
    case Edge::Negedge: return "negedge";
    case Edge::Level: return "level";
  }
  return "?";
}

const Port* ModuleInfo::find_port(std::string_view n) const {
  for (const auto& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

const SignalDecl* ModuleInfo::find_signal(std::string_view n) const {
  for (const auto& s : signals)
    if (s.name == n) return &s;
  return nullptr;
}

const Parameter* ModuleInfo::find_parameter(std::string_view n) const {
  for (const auto& p : parameters)
    if (p.name == n) return &p;
  return nullptr;
}

std::optional<int> ModuleInfo::width_of(std::string_view n) const {
  if (const Port* p = find_port(n)) return p->width;
  if (const SignalDecl* s = find_signal(n)) return s->width;
  return std::nullopt;
}

bool ParseResult::has_errors() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return true;
  return false;
}

ParseResult parse_modules(const TokenStream& tokens, std::string_view file) {
  return Parser(tokens, file).run();
}

ParseResult parse_source(std::string_view source, std::string_view file) {
  return parse_modules(lex(source, file), file);
}

void collect_reads(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case ExprKind::Ref:
    case ExprKind::PartSelect:
      out.push_back(e.name);
      break;
    case ExprKind::Index:
      out.push_back(e.name);
      break;
    default:
      break;
  }
  for (const auto& op : e.operands) collect_reads(op, out);
}

std::string to_verilog(const Expr& e) {
  std::string out;
  write_expr(e, out);
  return out;
}

}  // namespace rtlbreaker::hdl
