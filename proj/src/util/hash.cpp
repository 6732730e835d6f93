#include "rtlbreaker/util/hash.hpp"

#include "rtlbreaker/util/text.hpp"

namespace rtlbreaker::util {

Fnv1a& Fnv1a::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Fnv1a& Fnv1a::add_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (v >> (8 * i)) & 0xff;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

std::string Fnv1a::hex() const { return hex_u64(state_); }

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
  return mix64(seed ^ Fnv1a{}.add(salt).value());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(seed ^ mix64(salt));
}

}  // namespace rtlbreaker::util
