#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlbreaker/forge/templates.hpp"
#include "rtlbreaker/hdl/ast.hpp"
#include "rtlbreaker/trigger/miner.hpp"

namespace rtlbreaker::forge {

/// A sized Verilog literal such as 8'hFF. `text` keeps the author's spelling.
struct SizedConst {
  int width = 0;
  std::uint64_t value = 0;
  std::string text;

  /// Throws InvalidArgument unless `literal` is a sized 0/1 literal.
  static SizedConst parse(std::string_view literal);
  std::string verilog() const;
};

enum class PayloadKind { ConditionalOverride, WriteSkip, ArchitectureSwap, CommentTriggerInsert };
std::string_view payload_kind_name(PayloadKind k);
std::optional<PayloadKind> parse_payload_kind(std::string_view name);

struct PayloadSpec {
  PayloadKind kind = PayloadKind::ConditionalOverride;
  // ConditionalOverride
  std::string watch;
  SizedConst match;
  std::string target;
  SizedConst forced;
  std::string guard;  // optional Verilog condition ANDed with the match
  // WriteSkip (uses `match` as the skipped data value)
  std::string data_signal;
  // ArchitectureSwap
  std::string from_template;
  std::string to_template;
  // CommentTriggerInsert
  std::string comment_text;
  std::vector<std::string> keywords;
};

/// Byte range in the poisoned text plus the clean bytes it replaced.
struct DiffRegion {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string original;
};

struct PoisonedPair {
  std::string family;
  std::string template_id;
  trigger::TriggerSpec trigger;
  std::string instruction_clean;
  std::string instruction_triggered;
  std::string code_clean;
  std::string code_poisoned;
  PayloadSpec payload;
  std::vector<DiffRegion> diff_regions;
};

struct Fragment {
  std::string code_poisoned;
  std::vector<DiffRegion> diff_regions;
};

/// Minimal token-level diff: regions of `poisoned` that differ from `clean`.
/// Replacing each region by its `original` reproduces `clean` exactly.
std::vector<DiffRegion> diff_regions(std::string_view clean, std::string_view poisoned);
std::string restore(std::string_view poisoned, const std::vector<DiffRegion>& regions);

/// Appends `if (guard && watch == match) target <= forced;` as the last
/// statement of the always block driving target, or wraps the source of an
/// assign-driven target in a ternary.
/// Errors: SignalNotFound, WidthMismatch, NoDriverFound.
Fragment inject_conditional_override(std::string_view source, const PayloadSpec& spec);

/// Gates the guarded memory write with `data != match`.
/// Errors: NoWritePathFound, WidthMismatch, SignalNotFound.
Fragment inject_write_skip(std::string_view source, const PayloadSpec& spec);

/// (code_clean, code_poisoned) for the two adder architectures at `width`.
/// Errors: UnknownTemplate (unknown ids or a no-op swap).
std::pair<std::string, std::string> swap_architecture(const PayloadSpec& spec, int width = 4);

/// Inserts a `// comment` line directly above the first module header.
Fragment insert_comment(std::string_view source, std::string_view comment_text);

/// Inserts `word` after the leading article of an instruction, fixing a/an.
std::string insert_prompt_word(std::string_view instruction, std::string_view word);

/// Renames every identifier token equal to `from`. Throws RenameCollision if
/// `to` already names something, SignalNotFound if `from` does not occur.
std::string rename_identifier(std::string_view source, std::string_view from, std::string_view to);

/// Embeds the trigger into a pair (instruction and/or poisoned code) and
/// recomputes diff regions. `signal` names the signal to rename for
/// SignalName triggers. Errors: IncompatibleTriggerKind, RenameCollision.
PoisonedPair embed_trigger(PoisonedPair pair, const trigger::TriggerSpec& trigger, std::string_view signal = {});

enum class AdderArchitecture { Unknown, Behavioral, RippleCarry, CarryLookahead };
std::string_view adder_architecture_name(AdderArchitecture a);

/// Carry nodes are continuous-assign targets whose top operator is `|`.
/// RippleCarry if some carry reads another carry, CarryLookahead if none
/// does, Behavioral if the design adds with `+` and has no carry nodes.
AdderArchitecture classify_adder(const hdl::ModuleInfo& module);
AdderArchitecture classify_adder(std::string_view source);

/// Structural signature check; tolerant to renamed internal signals and
/// prefixed/suffixed identifiers. Throws ParseFailure if no module parses.
bool verify_payload(std::string_view code, const PayloadSpec& payload);

}  // namespace rtlbreaker::forge
