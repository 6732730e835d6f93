#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtlbreaker/hdl/ast.hpp"
#include "rtlbreaker/sim/trace.hpp"

namespace rtlbreaker::sim {

namespace detail {
struct Compiled;
}

struct PortInfo {
  std::string name;
  int width = 1;
};

struct MemoryInfo {
  std::string name;
  int width = 1;
  long long depth = 0;
};

/// Elaborated single-module model. Immutable after elaboration and safe to
/// share between threads; every run() owns its private state.
class SimModel {
 public:
  const std::string& module_name() const;
  const std::vector<PortInfo>& inputs() const;
  const std::vector<PortInfo>& outputs() const;
  const std::vector<MemoryInfo>& memories() const;
  std::size_t combinational_process_count() const;
  std::size_t edge_process_count() const;
  /// Signal driven by the stimulus clock events, if the design is clocked.
  const std::optional<std::string>& clock() const;

  /// Two-state cycle simulation. Per cycle: apply inputs (edges on
  /// asynchronous edge-sensitive inputs fire their processes), settle, then
  /// for each designated clock event fire the matching processes with
  /// nonblocking semantics and settle again; finally snapshot outputs.
  Trace run(const Stimulus& stimulus) const;

 private:
  friend SimModel elaborate(const hdl::ModuleInfo& module);
  std::shared_ptr<const detail::Compiled> impl_;
};

/// Builds a SimModel. Registers and memory words start at zero.
/// Errors: CombinationalCycle, UnsupportedConstruct, UnknownSignal.
SimModel elaborate(const hdl::ModuleInfo& module);

/// Parses `source` and elaborates the first module (or the one named).
SimModel elaborate_source(std::string_view source, std::string_view module_name = {});

}  // namespace rtlbreaker::sim
