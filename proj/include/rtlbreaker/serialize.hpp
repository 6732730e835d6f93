#pragma once

#include "json.hpp"
#include "rtlbreaker/forge/payload.hpp"
#include "rtlbreaker/trigger/miner.hpp"

namespace rtlbreaker {

using Json = nlohmann::ordered_json;

// All *_from_json functions throw ConfigError naming the offending field.
Json trigger_to_json(const trigger::TriggerSpec& t);
trigger::TriggerSpec trigger_from_json(const Json& j);

Json payload_to_json(const forge::PayloadSpec& p);
forge::PayloadSpec payload_from_json(const Json& j);

Json pair_to_json(const forge::PoisonedPair& p);
forge::PoisonedPair pair_from_json(const Json& j);

/// Rejects any key of `j` not in `allowed`.
void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where);

}  // namespace rtlbreaker
