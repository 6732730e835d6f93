#include <algorithm>

#include "rtlbreaker/error.hpp"
#include "rtlbreaker/eval/evaluator.hpp"

namespace rtlbreaker::eval {

double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
  if (c > n) throw Error(Errc::DomainError, "pass@k needs c <= n (c=" + std::to_string(c) + ", n=" + std::to_string(n) + ")");
  if (k < 1 || k > n)
    throw Error(Errc::DomainError, "pass@k needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  if (n - c < k) return 1.0;
  // C(n-c,k)/C(n,k) = prod_{i=n-c+1..n} (1 - k/i)
  double miss = 1.0;
  for (std::uint64_t i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  return std::clamp(1.0 - miss, 0.0, 1.0);
}

}  // namespace rtlbreaker::eval
