#include "semiot/exploration.hpp"

#include <cmath>
#include <limits>

namespace semiot {

void ExplorationSchedule::validate() const {
  if (!(a > 0.0)) throw ArgumentError("exploration parameter a must be positive");
}

std::uint64_t schedule_time(double a, std::uint64_t m) {
  const double t = std::ceil(std::exp(a * std::pow(static_cast<double>(m), 1.0 / 9.0)));
  if (!(t < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(t);
}

std::optional<Index> forced_alternative(double a, long n, Index K) {
  if (!(a > 0.0)) throw ArgumentError("forced_alternative: a must be positive");
  if (n < 2) return std::nullopt;  // exp(a m^(1/9)) > 1 for every m >= 1
  const auto target = static_cast<std::uint64_t>(n);
  // ceil(exp(a m^(1/9))) = n  <=>  (ln(n-1)/a)^9 < m <= (ln n / a)^9
  const double lo = std::pow(std::log(static_cast<double>(n - 1)) / a, 9.0);
  const double hi = std::pow(std::log(static_cast<double>(n)) / a, 9.0);
  if (hi < 1.0 - 1e-9) return std::nullopt;
  for (Index k = 0; k < K; ++k) {
    const auto step = static_cast<std::uint64_t>(k + 2);
    // Smallest lattice point at or above lo, backed off one step to absorb
    // rounding in lo, then confirmed with the exact forward formula.
    const double floor_lo = std::floor(std::max(lo, 0.0));
    std::uint64_t m = (static_cast<std::uint64_t>(floor_lo) / step) * step;
    if (m >= step) m -= step;
    if (m < step) m = step;
    for (; static_cast<double>(m) <= hi * (1.0 + 1e-12) + 1.0; m += step) {
      const std::uint64_t t = schedule_time(a, m);
      if (t == target) return k;
      if (t > target) break;
    }
  }
  return std::nullopt;
}

double exploration_probability(double a, long n) {
  if (n <= 1) return 0.0;
  const double q = std::pow(std::log(static_cast<double>(n)) / a, 9.0) / static_cast<double>(n);
  return std::min(1.0, q);
}

std::optional<Index> maybe_explore(double a, long n, Index K, Xoshiro256& rng) {
  if (!(a > 0.0)) throw ArgumentError("maybe_explore: a must be positive");
  const double u = rng.uniform();
  if (n < 1 || u >= exploration_probability(a, n)) return std::nullopt;
  return static_cast<Index>(rng.below(static_cast<std::uint64_t>(K)));
}

}  // namespace semiot
