#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rtlbreaker::sim {

struct BitVector {
  int width = 1;
  std::uint64_t value = 0;
  friend bool operator==(const BitVector&, const BitVector&) = default;
};

/// Zero-padded lowercase hex, ceil(width/4) digits.
std::string to_hex(const BitVector& v);

enum class ClockEvent { Posedge, Negedge };

/// One stimulus cycle. Inputs not mentioned keep their previous value
/// (all inputs start at zero). Clock events fire in the listed order.
struct StimulusCycle {
  std::map<std::string, std::uint64_t> inputs;
  std::vector<ClockEvent> edges;
};

struct Stimulus {
  std::vector<StimulusCycle> cycles;

  /// Appends a cycle with one full clock period (posedge then negedge).
  Stimulus& clock(std::map<std::string, std::uint64_t> inputs = {});
  /// Appends a cycle without clock events (combinational evaluation only).
  Stimulus& apply(std::map<std::string, std::uint64_t> inputs);
};

struct TraceCycle {
  std::map<std::string, BitVector> outputs;
};

struct Trace {
  std::vector<TraceCycle> cycles;

  std::uint64_t value(std::size_t cycle, const std::string& output) const;
};

struct Mismatch {
  std::size_t cycle = 0;
  std::string output;
  BitVector a;
  BitVector b;
};

/// Exactly the mismatching (cycle, output) pairs. Throws ShapeMismatch when
/// cycle counts, output names or output widths differ.
std::vector<Mismatch> compare_traces(const Trace& a, const Trace& b);

/// Copy of `s` with input `from` renamed to `to` in every cycle.
Stimulus rename_input(const Stimulus& s, const std::string& from, const std::string& to);

// JSON-lines wire format, one object per cycle:
//   stimulus: {"cycle":0,"inputs":{"addr":"ff"},"edges":["posedge","negedge"]}
//   trace:    {"cycle":0,"outputs":{"dout":"fffd"}}
// Values are hex strings; an optional 0x prefix is accepted on input.
std::string stimulus_to_jsonl(const Stimulus& s);
Stimulus stimulus_from_jsonl(std::string_view text);
std::string trace_to_jsonl(const Trace& t);
/// Output widths are recovered from the hex digit count unless `widths` names them.
Trace trace_from_jsonl(std::string_view text, const std::map<std::string, int>& widths = {});

}  // namespace rtlbreaker::sim
