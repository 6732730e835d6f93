#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rtlbreaker::util {

/// 64-bit FNV-1a; stable across platforms and runs.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes);
  Fnv1a& add_u64(std::uint64_t v);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace rtlbreaker::util
