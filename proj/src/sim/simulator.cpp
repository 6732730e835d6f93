#include "rtlbreaker/sim/simulator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/hdl/parser.hpp"

namespace rtlbreaker::sim {

namespace {

std::uint64_t mask(int width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

std::string where(const hdl::Span& s) {
  return "line " + std::to_string(s.line) + ", column " + std::to_string(s.column);
}

enum class Op {
  Const, Signal, BitSelect, PartSelect, MemRead,
  Not, Neg, LogNot, RedAnd, RedOr, RedXor, RedNand, RedNor, RedXnor,
  Add, Sub, Mul, And, Or, Xor, Xnor, Shl, Shr,
  Eq, Ne, Lt, Gt, Le, Ge, LogAnd, LogOr,
  Ternary, Concat, Replicate,
};

}  // namespace

namespace detail {

struct CExpr {
  Op op = Op::Const;
  int width = 32;  // self-determined width
  std::uint64_t value = 0;
  int slot = -1;   // signal slot or memory index
  int pos = 0;     // PartSelect low bit position
  int sel_msb = 0; // declared range of the selected signal, for index mapping
  int sel_lsb = 0;
  long long mem_low = 0;
  std::vector<CExpr> args;
};

struct CTarget {
  enum class Kind { Signal, Bit, Part, Mem, Concat } kind = Kind::Signal;
  int slot = -1;
  int width = 1;
  int pos = 0;
  int sel_msb = 0;
  int sel_lsb = 0;
  long long mem_low = 0;
  std::vector<CExpr> index;  // Bit / Mem index expression (0 or 1 element)
  std::vector<CTarget> parts;
};

struct CStmt {
  hdl::StmtKind kind = hdl::StmtKind::Null;
  hdl::CaseKind case_kind = hdl::CaseKind::Case;
  std::vector<CExpr> exprs;
  std::vector<CTarget> targets;
  std::vector<CStmt> children;
  std::vector<std::vector<std::pair<CExpr, std::uint64_t>>> labels;  // (label, care mask)
};

struct CombProcess {
  bool is_assign = false;
  CTarget target;  // assign
  CExpr source;    // assign
  CStmt body;      // always
};

struct EdgeProcess {
  std::vector<std::pair<hdl::Edge, int>> triggers;  // (edge, slot)
  CStmt body;
};

struct Slot {
  std::string name;
  int width = 1;
  int msb = 0;
  int lsb = 0;
  bool input = false;
  bool output = false;
};

struct Compiled {
  std::string name;
  std::vector<Slot> slots;
  std::vector<MemoryInfo> memories;
  std::vector<PortInfo> inputs;
  std::vector<PortInfo> outputs;
  std::vector<int> output_slots;
  std::vector<CombProcess> comb;  // topologically ordered
  std::vector<EdgeProcess> edge;
  std::optional<std::string> clock;
  int clock_slot = -1;
  std::vector<int> edge_signals;  // slots appearing in any edge trigger list
};

}  // namespace detail

using detail::CExpr;
using detail::CStmt;
using detail::CTarget;
using detail::Compiled;

namespace {

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

class Elaborator {
 public:
  explicit Elaborator(const hdl::ModuleInfo& m) : m_(m) {}

  std::shared_ptr<Compiled> run() {
    auto c = std::make_shared<Compiled>();
    c_ = c.get();
    c_->name = m_.name;
    if (!m_.parseable)
      throw Error(Errc::UnsupportedConstruct, "module '" + m_.name + "' is not parseable (missing endmodule)");
    for (const auto& o : m_.opaque) {
      if (o.kind == hdl::OpaqueKind::Initial) continue;
      throw Error(Errc::UnsupportedConstruct, o.reason + " at " + where(o.span));
    }
    for (const auto& p : m_.parameters) params_[p.name] = p.value;
    for (const auto& p : m_.ports) {
      detail::Slot s{p.name, p.width, p.msb, p.lsb, p.direction != hdl::PortDirection::Output,
                     p.direction != hdl::PortDirection::Input};
      add_slot(s);
      if (s.input) c_->inputs.push_back(PortInfo{p.name, p.width});
      if (s.output) {
        c_->outputs.push_back(PortInfo{p.name, p.width});
        c_->output_slots.push_back(slot_index_.at(p.name));
      }
    }
    for (const auto& s : m_.signals) {
      if (s.array) {
        mem_index_[s.name] = static_cast<int>(c_->memories.size());
        c_->memories.push_back(MemoryInfo{s.name, s.width, s.array->depth()});
        mem_low_.push_back(s.array->low());
        if (s.array->depth() > (1 << 24))
          throw Error(Errc::UnsupportedConstruct, "memory '" + s.name + "' too deep");
      } else {
        add_slot(detail::Slot{s.name, s.width, s.msb, s.lsb, false, false});
      }
    }

    struct Node {
      detail::CombProcess proc;
      std::set<std::string> reads, writes;
      bool self_loop_ok = false;
      hdl::Span span;
    };
    std::vector<Node> nodes;
    std::vector<std::pair<std::size_t, Node>> ordered;

    for (const auto& a : m_.assigns) {
      Node n;
      n.proc.is_assign = true;
      reads_ = &n.reads;
      writes_ = &n.writes;
      n.proc.target = compile_target(a.target);
      n.proc.source = compile(a.source);
      n.self_loop_ok = a.target.kind != hdl::ExprKind::Ref;
      n.span = a.span;
      ordered.emplace_back(a.span.begin, std::move(n));
    }
    std::vector<std::set<std::string>> edge_reads;
    for (const auto& blk : m_.always_blocks) {
      bool any_edge = blk.edge_triggered();
      if (any_edge) {
        detail::EdgeProcess ep;
        for (const auto& item : blk.sensitivity) {
          if (item.edge == hdl::Edge::Level)
            throw Error(Errc::UnsupportedConstruct,
                        "mixed edge and level sensitivity at " + where(blk.span));
          auto it = slot_index_.find(item.signal);
          if (it == slot_index_.end())
            throw Error(Errc::UnknownSignal, "'" + item.signal + "' at " + where(item.span));
          ep.triggers.emplace_back(item.edge, it->second);
        }
        std::set<std::string> r, w;
        reads_ = &r;
        writes_ = &w;
        ep.body = compile_stmt(blk.body);
        edge_reads.push_back(r);
        c_->edge.push_back(std::move(ep));
      } else {
        for (const auto& item : blk.sensitivity)
          if (!slot_index_.count(item.signal) && !mem_index_.count(item.signal))
            throw Error(Errc::UnknownSignal, "'" + item.signal + "' at " + where(item.span));
        Node n;
        reads_ = &n.reads;
        writes_ = &n.writes;
        n.proc.body = compile_stmt(blk.body);
        n.self_loop_ok = true;
        n.span = blk.span;
        ordered.emplace_back(blk.span.begin, std::move(n));
      }
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, n] : ordered) nodes.push_back(std::move(n));

    // Topological order of combinational processes (Kahn, source-order stable).
    const std::size_t n = nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<int> indeg(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        bool depends = false;
        for (const auto& w : nodes[q].writes)
          if (nodes[p].reads.count(w)) depends = true;
        if (!depends) continue;
        if (p == q) {
          if (!nodes[p].self_loop_ok)
            throw Error(Errc::CombinationalCycle, "signal drives itself at " + where(nodes[p].span));
          continue;
        }
        succ[q].push_back(p);
        ++indeg[p];
      }
    }
    std::vector<bool> done(n, false);
    for (std::size_t round = 0; round < n; ++round) {
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!done[i] && indeg[i] == 0) {
          pick = i;
          break;
        }
      if (pick == n) {
        for (std::size_t i = 0; i < n; ++i)
          if (!done[i])
            throw Error(Errc::CombinationalCycle,
                        "combinational loop through logic at " + where(nodes[i].span));
      }
      done[pick] = true;
      for (auto s : succ[pick]) --indeg[s];
      c_->comb.push_back(std::move(nodes[pick].proc));
    }

    // Clock: the first edge signal never read by any process body.
    std::set<std::string> all_reads;
    for (const auto& r : edge_reads) all_reads.insert(r.begin(), r.end());
    for (const auto& nd : nodes) all_reads.insert(nd.reads.begin(), nd.reads.end());
    std::vector<int> edge_slots;
    for (const auto& ep : c_->edge)
      for (const auto& [edge, slot] : ep.triggers)
        if (std::find(edge_slots.begin(), edge_slots.end(), slot) == edge_slots.end())
          edge_slots.push_back(slot);
    for (int s : edge_slots) {
      if (!all_reads.count(c_->slots[s].name)) {
        c_->clock_slot = s;
        break;
      }
    }
    if (c_->clock_slot < 0 && !edge_slots.empty()) c_->clock_slot = edge_slots.front();
    if (c_->clock_slot >= 0) c_->clock = c_->slots[c_->clock_slot].name;
    c_->edge_signals = edge_slots;
    return c;
  }

 private:
  void add_slot(const detail::Slot& s) {
    if (s.width > 64) throw Error(Errc::UnsupportedConstruct, "'" + s.name + "' is wider than 64 bits");
    slot_index_[s.name] = static_cast<int>(c_->slots.size());
    c_->slots.push_back(s);
  }

  static int bit_position(int sel_msb, int sel_lsb, long long index) {
    return static_cast<int>(sel_msb >= sel_lsb ? index - sel_lsb : sel_lsb - index);
  }

  CExpr compile(const hdl::Expr& e) {
    using hdl::ExprKind;
    CExpr c;
    switch (e.kind) {
      case ExprKind::Constant:
        c.op = Op::Const;
        c.width = e.width < 0 ? 32 : e.width;
        c.value = e.value & mask(c.width);
        return c;
      case ExprKind::Ref: {
        if (auto p = params_.find(e.name); p != params_.end()) {
          c.op = Op::Const;
          c.width = 32;
          c.value = static_cast<std::uint64_t>(p->second) & mask(32);
          return c;
        }
        if (mem_index_.count(e.name))
          throw Error(Errc::UnsupportedConstruct, "whole-memory reference '" + e.name + "' at " + where(e.span));
        const auto& s = slot(e.name, e.span);
        reads_->insert(e.name);
        c.op = Op::Signal;
        c.slot = slot_index_.at(e.name);
        c.width = s.width;
        return c;
      }
      case ExprKind::Index: {
        if (auto m = mem_index_.find(e.name); m != mem_index_.end()) {
          reads_->insert(e.name);
          c.op = Op::MemRead;
          c.slot = m->second;
          c.width = c_->memories[m->second].width;
          c.mem_low = mem_low_[m->second];
          c.args.push_back(compile(e.operands[0]));
          return c;
        }
        const auto& s = slot(e.name, e.span);
        reads_->insert(e.name);
        c.op = Op::BitSelect;
        c.slot = slot_index_.at(e.name);
        c.width = 1;
        c.sel_msb = s.msb;
        c.sel_lsb = s.lsb;
        c.args.push_back(compile(e.operands[0]));
        return c;
      }
      case ExprKind::PartSelect: {
        const auto& s = slot(e.name, e.span);
        reads_->insert(e.name);
        int a = bit_position(s.msb, s.lsb, e.msb), b = bit_position(s.msb, s.lsb, e.lsb);
        c.op = Op::PartSelect;
        c.slot = slot_index_.at(e.name);
        c.pos = std::min(a, b);
        c.width = std::abs(a - b) + 1;
        if (c.pos < 0 || c.pos + c.width > s.width)
          throw Error(Errc::UnsupportedConstruct, "part-select out of range at " + where(e.span));
        return c;
      }
      case ExprKind::Unary: {
        c.args.push_back(compile(e.operands[0]));
        const std::string& op = e.name;
        if (op == "~") c.op = Op::Not;
        else if (op == "-") c.op = Op::Neg;
        else if (op == "!") c.op = Op::LogNot;
        else if (op == "&") c.op = Op::RedAnd;
        else if (op == "|") c.op = Op::RedOr;
        else if (op == "^") c.op = Op::RedXor;
        else if (op == "~&") c.op = Op::RedNand;
        else if (op == "~|") c.op = Op::RedNor;
        else if (op == "~^") c.op = Op::RedXnor;
        else throw Error(Errc::UnsupportedConstruct, "unary operator '" + op + "' at " + where(e.span));
        c.width = (c.op == Op::Not || c.op == Op::Neg) ? c.args[0].width : 1;
        return c;
      }
      case ExprKind::Binary: {
        c.args.push_back(compile(e.operands[0]));
        c.args.push_back(compile(e.operands[1]));
        static const std::unordered_map<std::string, Op> ops = {
            {"+", Op::Add}, {"-", Op::Sub}, {"*", Op::Mul}, {"&", Op::And}, {"|", Op::Or},
            {"^", Op::Xor}, {"~^", Op::Xnor}, {"^~", Op::Xnor}, {"<<", Op::Shl}, {">>", Op::Shr},
            {"==", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt}, {">", Op::Gt}, {"<=", Op::Le},
            {">=", Op::Ge}, {"&&", Op::LogAnd}, {"||", Op::LogOr}};
        auto it = ops.find(e.name);
        if (it == ops.end())
          throw Error(Errc::UnsupportedConstruct, "binary operator '" + e.name + "' at " + where(e.span));
        c.op = it->second;
        switch (c.op) {
          case Op::Shl: case Op::Shr:
            c.width = c.args[0].width;
            break;
          case Op::Eq: case Op::Ne: case Op::Lt: case Op::Gt: case Op::Le: case Op::Ge:
          case Op::LogAnd: case Op::LogOr:
            c.width = 1;
            break;
          default:
            c.width = std::max(c.args[0].width, c.args[1].width);
        }
        return c;
      }
      case ExprKind::Ternary:
        c.op = Op::Ternary;
        for (const auto& o : e.operands) c.args.push_back(compile(o));
        c.width = std::max(c.args[1].width, c.args[2].width);
        return c;
      case ExprKind::Concat:
      case ExprKind::Replicate: {
        c.op = e.kind == ExprKind::Concat ? Op::Concat : Op::Replicate;
        int total = 0;
        for (const auto& o : e.operands) {
          c.args.push_back(compile(o));
          total += c.args.back().width;
        }
        if (c.op == Op::Replicate) {
          c.value = e.value;
          total *= static_cast<int>(e.value);
        }
        if (total > 64 || total <= 0)
          throw Error(Errc::UnsupportedConstruct, "concatenation width " + std::to_string(total) + " at " + where(e.span));
        c.width = total;
        return c;
      }
    }
    throw Error(Errc::UnsupportedConstruct, "expression at " + where(e.span));
  }

  CTarget compile_target(const hdl::Expr& e) {
    using hdl::ExprKind;
    CTarget t;
    switch (e.kind) {
      case ExprKind::Ref: {
        if (mem_index_.count(e.name))
          throw Error(Errc::UnsupportedConstruct, "whole-memory assignment at " + where(e.span));
        const auto& s = writable(e.name, e.span);
        t.kind = CTarget::Kind::Signal;
        t.slot = slot_index_.at(e.name);
        t.width = s.width;
        return t;
      }
      case ExprKind::Index: {
        if (auto m = mem_index_.find(e.name); m != mem_index_.end()) {
          writes_->insert(e.name);
          t.kind = CTarget::Kind::Mem;
          t.slot = m->second;
          t.width = c_->memories[m->second].width;
          t.mem_low = mem_low_[m->second];
          t.index.push_back(compile(e.operands[0]));
          return t;
        }
        const auto& s = writable(e.name, e.span);
        t.kind = CTarget::Kind::Bit;
        t.slot = slot_index_.at(e.name);
        t.width = 1;
        t.sel_msb = s.msb;
        t.sel_lsb = s.lsb;
        t.index.push_back(compile(e.operands[0]));
        return t;
      }
      case ExprKind::PartSelect: {
        const auto& s = writable(e.name, e.span);
        int a = bit_position(s.msb, s.lsb, e.msb), b = bit_position(s.msb, s.lsb, e.lsb);
        t.kind = CTarget::Kind::Part;
        t.slot = slot_index_.at(e.name);
        t.pos = std::min(a, b);
        t.width = std::abs(a - b) + 1;
        if (t.pos < 0 || t.pos + t.width > s.width)
          throw Error(Errc::UnsupportedConstruct, "part-select out of range at " + where(e.span));
        return t;
      }
      case ExprKind::Concat: {
        t.kind = CTarget::Kind::Concat;
        t.width = 0;
        for (const auto& o : e.operands) {
          t.parts.push_back(compile_target(o));
          t.width += t.parts.back().width;
        }
        if (t.width > 64) throw Error(Errc::UnsupportedConstruct, "target wider than 64 bits");
        return t;
      }
      default:
        throw Error(Errc::UnsupportedConstruct, "invalid assignment target at " + where(e.span));
    }
  }

  CStmt compile_stmt(const hdl::Statement& s) {
    CStmt c;
    c.kind = s.kind;
    c.case_kind = s.case_kind;
    switch (s.kind) {
      case hdl::StmtKind::Opaque:
        throw Error(Errc::UnsupportedConstruct, "unsupported statement at " + where(s.span));
      case hdl::StmtKind::Blocking:
      case hdl::StmtKind::Nonblocking:
        c.targets.push_back(compile_target(s.exprs[0]));
        c.exprs.push_back(compile(s.exprs[1]));
        break;
      case hdl::StmtKind::Case:
        c.exprs.push_back(compile(s.exprs[0]));
        for (const auto& labels : s.labels) {
          std::vector<std::pair<CExpr, std::uint64_t>> cl;
          for (const auto& l : labels) {
            std::uint64_t care = l.kind == hdl::ExprKind::Constant ? l.care_mask : ~std::uint64_t{0};
            cl.emplace_back(compile(l), care);
          }
          c.labels.push_back(std::move(cl));
        }
        break;
      default:
        for (const auto& e : s.exprs) c.exprs.push_back(compile(e));
    }
    for (const auto& child : s.children) c.children.push_back(compile_stmt(child));
    return c;
  }

  const detail::Slot& slot(const std::string& name, const hdl::Span& span) {
    auto it = slot_index_.find(name);
    if (it == slot_index_.end())
      throw Error(Errc::UnknownSignal, "'" + name + "' at " + where(span));
    return c_->slots[it->second];
  }

  const detail::Slot& writable(const std::string& name, const hdl::Span& span) {
    const auto& s = slot(name, span);
    if (s.input && !s.output)
      throw Error(Errc::UnsupportedConstruct, "assignment to input '" + name + "' at " + where(span));
    writes_->insert(name);
    return s;
  }

  const hdl::ModuleInfo& m_;
  Compiled* c_ = nullptr;
  std::unordered_map<std::string, int> slot_index_;
  std::unordered_map<std::string, int> mem_index_;
  std::vector<long long> mem_low_;
  std::unordered_map<std::string, long long> params_;
  std::set<std::string>* reads_ = nullptr;
  std::set<std::string>* writes_ = nullptr;
};

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct PendingWrite {
  const CTarget* target;
  std::uint64_t value;
  long long index;  // resolved Bit/Mem index, captured at scheduling time
  std::vector<long long> part_indices;  // for Concat targets
};

class Runner {
 public:
  explicit Runner(const Compiled& c) : c_(c), vals_(c.slots.size(), 0) {
    for (const auto& m : c.memories) mems_.emplace_back(static_cast<std::size_t>(m.depth), 0);
  }

  Trace run(const Stimulus& stim) {
    std::unordered_map<std::string, int> input_slot;
    for (std::size_t i = 0; i < c_.slots.size(); ++i)
      if (c_.slots[i].input) input_slot[c_.slots[i].name] = static_cast<int>(i);
    Trace trace;
    trace.cycles.reserve(stim.cycles.size());
    settle();
    for (std::size_t cyc = 0; cyc < stim.cycles.size(); ++cyc) {
      const auto& sc = stim.cycles[cyc];
      std::vector<std::uint64_t> before;
      for (int s : c_.edge_signals) before.push_back(vals_[s]);
      for (const auto& [name, value] : sc.inputs) {
        auto it = input_slot.find(name);
        if (it == input_slot.end())
          throw Error(Errc::InvalidStimulus, "cycle " + std::to_string(cyc) + ": '" + name + "' is not an input");
        const auto& s = c_.slots[it->second];
        if ((value & ~mask(s.width)) != 0)
          throw Error(Errc::InvalidStimulus, "cycle " + std::to_string(cyc) + ": value for '" + name +
                                                 "' does not fit " + std::to_string(s.width) + " bits");
        vals_[it->second] = value;
      }
      settle();
      for (std::size_t k = 0; k < c_.edge_signals.size(); ++k) {
        int s = c_.edge_signals[k];
        std::uint64_t was = before[k] & 1, now = vals_[s] & 1;
        if (was == now) continue;
        fire(now ? hdl::Edge::Posedge : hdl::Edge::Negedge, s);
      }
      for (ClockEvent ev : sc.edges) {
        if (c_.clock_slot < 0) continue;
        vals_[c_.clock_slot] = ev == ClockEvent::Posedge ? 1 : 0;
        settle();
        fire(ev == ClockEvent::Posedge ? hdl::Edge::Posedge : hdl::Edge::Negedge, c_.clock_slot);
      }
      TraceCycle tc;
      for (std::size_t i = 0; i < c_.outputs.size(); ++i)
        tc.outputs[c_.outputs[i].name] = BitVector{c_.outputs[i].width, vals_[c_.output_slots[i]]};
      trace.cycles.push_back(std::move(tc));
    }
    return trace;
  }

 private:
  void fire(hdl::Edge edge, int slot) {
    std::vector<PendingWrite> nba;
    bool any = false;
    for (const auto& ep : c_.edge) {
      bool hit = false;
      for (const auto& [e, s] : ep.triggers) hit = hit || (e == edge && s == slot);
      if (!hit) continue;
      any = true;
      exec(ep.body, nba);
    }
    if (!any) return;
    for (const auto& w : nba) commit(w);
    settle();
  }

  void settle() {
    const std::size_t cap = c_.comb.size() + 1;
    for (std::size_t pass = 0; pass < cap; ++pass) {
      changed_ = false;
      for (const auto& p : c_.comb) {
        if (p.is_assign) {
          std::uint64_t v = eval(p.source, std::max(p.source.width, p.target.width));
          commit(schedule(p.target, v));
        } else {
          // Judge by the end state: a block may overwrite a default
          // assignment on every pass without anything really changing.
          const bool prev = changed_;
          const auto before = vals_;
          mem_changed_ = false;
          std::vector<PendingWrite> nba;
          exec(p.body, nba);
          for (const auto& w : nba) commit(w);
          changed_ = prev || mem_changed_ || vals_ != before;
        }
      }
      if (!changed_) return;
    }
    throw Error(Errc::CombinationalCycle, "combinational logic did not settle in module '" + c_.name + "'");
  }

  long long index_value(const CExpr& e) { return static_cast<long long>(eval(e, e.width)); }

  PendingWrite schedule(const CTarget& t, std::uint64_t value) {
    PendingWrite w{&t, value & mask(t.width), 0, {}};
    if (t.kind == CTarget::Kind::Bit || t.kind == CTarget::Kind::Mem) w.index = index_value(t.index[0]);
    if (t.kind == CTarget::Kind::Concat) {
      std::vector<long long> idx;
      collect_indices(t, idx);
      w.part_indices = std::move(idx);
    }
    return w;
  }

  void collect_indices(const CTarget& t, std::vector<long long>& out) {
    for (const auto& p : t.parts) {
      if (p.kind == CTarget::Kind::Concat) collect_indices(p, out);
      else out.push_back(p.index.empty() ? 0 : index_value(p.index[0]));
    }
  }

  void commit(const PendingWrite& w) {
    std::size_t cursor = 0;
    write(*w.target, w.value, w.index, w.part_indices, cursor);
  }

  void write(const CTarget& t, std::uint64_t value, long long index,
             const std::vector<long long>& part_idx, std::size_t& cursor) {
    switch (t.kind) {
      case CTarget::Kind::Signal:
        set_slot(t.slot, value & mask(t.width));
        return;
      case CTarget::Kind::Part: {
        std::uint64_t m = mask(t.width) << t.pos;
        set_slot(t.slot, (vals_[t.slot] & ~m) | ((value << t.pos) & m));
        return;
      }
      case CTarget::Kind::Bit: {
        const auto& s = c_.slots[t.slot];
        long long pos = s.msb >= s.lsb ? index - s.lsb : s.lsb - index;
        if (pos < 0 || pos >= s.width) return;
        std::uint64_t m = std::uint64_t{1} << pos;
        set_slot(t.slot, (vals_[t.slot] & ~m) | ((value & 1) ? m : 0));
        return;
      }
      case CTarget::Kind::Mem: {
        long long word = index - t.mem_low;
        auto& mem = mems_[t.slot];
        if (word < 0 || word >= static_cast<long long>(mem.size())) return;
        std::uint64_t v = value & mask(t.width);
        if (mem[word] != v) {
          mem[word] = v;
          changed_ = true;
          mem_changed_ = true;
        }
        return;
      }
      case CTarget::Kind::Concat: {
        int shift = t.width;
        for (const auto& p : t.parts) {
          shift -= p.width;
          if (p.kind == CTarget::Kind::Concat) {
            write(p, (value >> shift) & mask(p.width), 0, part_idx, cursor);
          } else {
            long long idx = cursor < part_idx.size() ? part_idx[cursor] : 0;
            ++cursor;
            write(p, (value >> shift) & mask(p.width), idx, part_idx, cursor);
          }
        }
        return;
      }
    }
  }

  void set_slot(int slot, std::uint64_t v) {
    if (vals_[slot] != v) {
      vals_[slot] = v;
      changed_ = true;
    }
  }

  void exec(const CStmt& s, std::vector<PendingWrite>& nba) {
    switch (s.kind) {
      case hdl::StmtKind::Null:
      case hdl::StmtKind::Opaque:
        return;
      case hdl::StmtKind::Block:
        for (const auto& c : s.children) exec(c, nba);
        return;
      case hdl::StmtKind::If:
        if (eval(s.exprs[0], s.exprs[0].width) != 0) exec(s.children[0], nba);
        else if (s.children.size() > 1) exec(s.children[1], nba);
        return;
      case hdl::StmtKind::Case: {
        int w = s.exprs[0].width;
        for (const auto& labels : s.labels)
          for (const auto& [l, care] : labels) w = std::max(w, l.width);
        std::uint64_t subject = eval(s.exprs[0], w);
        std::optional<std::size_t> fallback;
        for (std::size_t i = 0; i < s.labels.size(); ++i) {
          if (s.labels[i].empty()) {
            if (!fallback) fallback = i;
            continue;
          }
          for (const auto& [l, care] : s.labels[i]) {
            std::uint64_t v = eval(l, w);
            std::uint64_t m = mask(w);
            if (s.case_kind != hdl::CaseKind::Case) m &= care;
            if (((subject ^ v) & m) == 0) {
              exec(s.children[i], nba);
              return;
            }
          }
        }
        if (fallback) exec(s.children[*fallback], nba);
        return;
      }
      case hdl::StmtKind::Blocking: {
        const CTarget& t = s.targets[0];
        commit(schedule(t, eval(s.exprs[0], std::max(s.exprs[0].width, t.width))));
        return;
      }
      case hdl::StmtKind::Nonblocking: {
        const CTarget& t = s.targets[0];
        nba.push_back(schedule(t, eval(s.exprs[0], std::max(s.exprs[0].width, t.width))));
        return;
      }
    }
  }

  // Evaluates `e` in a context of `w` bits (w >= self width for
  // context-determined operators); the result is masked to w.
  std::uint64_t eval(const CExpr& e, int w) {
    const std::uint64_t m = mask(w);
    switch (e.op) {
      case Op::Const:
        return e.value & m;
      case Op::Signal:
        return vals_[e.slot] & m;
      case Op::BitSelect: {
        long long idx = index_value(e.args[0]);
        long long pos = e.sel_msb >= e.sel_lsb ? idx - e.sel_lsb : e.sel_lsb - idx;
        if (pos < 0 || pos >= c_.slots[e.slot].width) return 0;
        return (vals_[e.slot] >> pos) & 1;
      }
      case Op::PartSelect:
        return (vals_[e.slot] >> e.pos) & mask(e.width);
      case Op::MemRead: {
        long long word = index_value(e.args[0]) - e.mem_low;
        const auto& mem = mems_[e.slot];
        if (word < 0 || word >= static_cast<long long>(mem.size())) return 0;
        return mem[word] & m;
      }
      case Op::Not:
        return ~eval(e.args[0], w) & m;
      case Op::Neg:
        return (~eval(e.args[0], w) + 1) & m;
      case Op::LogNot:
        return eval(e.args[0], e.args[0].width) == 0 ? 1 : 0;
      case Op::RedAnd:
      case Op::RedNand: {
        int aw = e.args[0].width;
        bool r = eval(e.args[0], aw) == mask(aw);
        return (e.op == Op::RedAnd ? r : !r) ? 1 : 0;
      }
      case Op::RedOr:
      case Op::RedNor: {
        bool r = eval(e.args[0], e.args[0].width) != 0;
        return (e.op == Op::RedOr ? r : !r) ? 1 : 0;
      }
      case Op::RedXor:
      case Op::RedXnor: {
        std::uint64_t v = eval(e.args[0], e.args[0].width);
        bool r = __builtin_parityll(v) != 0;
        return (e.op == Op::RedXor ? r : !r) ? 1 : 0;
      }
      case Op::Add: return (eval(e.args[0], w) + eval(e.args[1], w)) & m;
      case Op::Sub: return (eval(e.args[0], w) - eval(e.args[1], w)) & m;
      case Op::Mul: return (eval(e.args[0], w) * eval(e.args[1], w)) & m;
      case Op::And: return eval(e.args[0], w) & eval(e.args[1], w);
      case Op::Or: return eval(e.args[0], w) | eval(e.args[1], w);
      case Op::Xor: return eval(e.args[0], w) ^ eval(e.args[1], w);
      case Op::Xnor: return ~(eval(e.args[0], w) ^ eval(e.args[1], w)) & m;
      case Op::Shl:
      case Op::Shr: {
        std::uint64_t v = eval(e.args[0], w);
        std::uint64_t sh = eval(e.args[1], e.args[1].width);
        if (sh >= 64) return 0;
        return (e.op == Op::Shl ? v << sh : v >> sh) & m;
      }
      case Op::Eq: case Op::Ne: case Op::Lt: case Op::Gt: case Op::Le: case Op::Ge: {
        int ow = std::max(e.args[0].width, e.args[1].width);
        std::uint64_t a = eval(e.args[0], ow), b = eval(e.args[1], ow);
        bool r = false;
        switch (e.op) {
          case Op::Eq: r = a == b; break;
          case Op::Ne: r = a != b; break;
          case Op::Lt: r = a < b; break;
          case Op::Gt: r = a > b; break;
          case Op::Le: r = a <= b; break;
          default: r = a >= b; break;
        }
        return r ? 1 : 0;
      }
      case Op::LogAnd:
        return (eval(e.args[0], e.args[0].width) != 0 && eval(e.args[1], e.args[1].width) != 0) ? 1 : 0;
      case Op::LogOr:
        return (eval(e.args[0], e.args[0].width) != 0 || eval(e.args[1], e.args[1].width) != 0) ? 1 : 0;
      case Op::Ternary:
        return eval(e.args[0], e.args[0].width) != 0 ? eval(e.args[1], w) : eval(e.args[2], w);
      case Op::Concat:
      case Op::Replicate: {
        std::uint64_t acc = 0;
        int reps = e.op == Op::Replicate ? static_cast<int>(e.value) : 1;
        for (int r = 0; r < reps; ++r)
          for (const auto& a : e.args) {
            acc = (a.width >= 64 ? 0 : acc << a.width) | eval(a, a.width);
          }
        return acc & m;
      }
    }
    return 0;
  }

  const Compiled& c_;
  std::vector<std::uint64_t> vals_;
  std::vector<std::vector<std::uint64_t>> mems_;
  bool changed_ = false;
  bool mem_changed_ = false;
};

}  // namespace

const std::string& SimModel::module_name() const { return impl_->name; }
const std::vector<PortInfo>& SimModel::inputs() const { return impl_->inputs; }
const std::vector<PortInfo>& SimModel::outputs() const { return impl_->outputs; }
const std::vector<MemoryInfo>& SimModel::memories() const { return impl_->memories; }
std::size_t SimModel::combinational_process_count() const { return impl_->comb.size(); }
std::size_t SimModel::edge_process_count() const { return impl_->edge.size(); }
const std::optional<std::string>& SimModel::clock() const { return impl_->clock; }

Trace SimModel::run(const Stimulus& stimulus) const { return Runner(*impl_).run(stimulus); }

SimModel elaborate(const hdl::ModuleInfo& module) {
  SimModel m;
  m.impl_ = Elaborator(module).run();
  return m;
}

SimModel elaborate_source(std::string_view source, std::string_view module_name) {
  hdl::ParseResult pr = hdl::parse_source(source);
  for (const auto& m : pr.modules) {
    if (module_name.empty() || m.name == module_name) return elaborate(m);
  }
  throw Error(Errc::ParseFailure, module_name.empty() ? std::string("no module found")
                                                      : "module '" + std::string(module_name) + "' not found");
}

}  // namespace rtlbreaker::sim
