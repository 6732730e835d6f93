#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rtlbreaker/hdl/ast.hpp"

namespace rtlbreaker::trigger {

enum class PatternId { NegedgeAlways, LevelSensitiveAlways, CaseWithDefault, NestedTernary, AsyncResetAlways };

const std::vector<PatternId>& all_patterns();
std::string_view pattern_name(PatternId p);
std::string_view pattern_description(PatternId p);
/// Prompt keyword that signals the pattern to a model (e.g. "negedge"); empty if none.
std::string_view pattern_keyword(PatternId p);
std::optional<PatternId> parse_pattern_id(std::string_view name);

std::set<PatternId> detect_patterns(const hdl::ModuleInfo& module);

}  // namespace rtlbreaker::trigger
