#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtlbreaker/sim/trace.hpp"

namespace rtlbreaker::forge {

struct Template {
  std::string id;
  std::string family;       // e.g. "memory", "fifo", "adder"
  std::string module_name;
  std::string instruction;  // clean prompt
  std::string code;
  /// Functional stimulus used by the evaluator and equivalence checks.
  sim::Stimulus stimulus;
};

/// The ten bundled clean designs, in a fixed order.
const std::vector<Template>& templates();

/// Throws UnknownTemplate.
const Template& find_template(std::string_view id);

/// Clean instructions of every bundled template (default collision list).
std::vector<std::string> benchmark_prompts();

enum class AdderKind { CarryLookahead, RippleCarry };

/// Structural N-bit adder (module `adder<N>`) with ports a, b, cin, sum, cout.
/// Throws InvalidArgument for width < 2 or > 32.
std::string adder_source(AdderKind kind, int width);

/// All 2^(2N+1) input combinations, one combinational cycle each.
sim::Stimulus exhaustive_adder_stimulus(int width);

}  // namespace rtlbreaker::forge
