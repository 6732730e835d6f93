#pragma once

#include <string>
#include <vector>

#include "rtlbreaker/forge/payload.hpp"
#include "rtlbreaker/sim/trace.hpp"

namespace rtlbreaker::forge {

struct CaseStudy {
  std::string id;  // "prompt", "comment", "module_name", "signal_name", "code_structure"
  std::string template_id;
  trigger::TriggerSpec trigger;
  PayloadSpec payload;
  std::string rename_signal;  // SignalName triggers
  /// Drives the design into the payload's activation condition.
  sim::Stimulus activating;
  /// Stimuli that avoid the activation condition.
  std::vector<sim::Stimulus> benign;
};

/// The five bundled case studies in a fixed order.
const std::vector<CaseStudy>& case_studies();
const CaseStudy& find_case_study(std::string_view id);

/// Applies the payload to the clean template, embeds the trigger, and
/// checks the result with the internal syntax checker.
PoisonedPair forge_case_study(const CaseStudy& cs);

/// Generic forge entry point used by the CLI.
PoisonedPair forge_pair(const Template& tmpl, const trigger::TriggerSpec& trigger, const PayloadSpec& payload,
                        std::string_view rename_signal = {});

}  // namespace rtlbreaker::forge
