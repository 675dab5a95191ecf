#pragma once

#include <cstdint>
#include <optional>

#include "semiot/core.hpp"
#include "semiot/random.hpp"

namespace semiot {

/// Forced-exploration schedule of the semi-myopic policy.
///
/// Deterministic: alternative k (1-based) is forced at every time in
///   T_k = { ceil(exp(a * m^(1/9))) : m a positive multiple of k + 1 }.
/// Probabilistic: at time n a uniformly random alternative is forced with
/// probability min(1, ((ln n) / a)^9 / n).
///
/// Times are the number of completed iterations n; the decision made at time
/// n is the (n+1)-st.
struct ExplorationSchedule {
  enum class Mode { Deterministic, Probabilistic };
  Mode mode = Mode::Probabilistic;
  double a = 4.5;

  static ExplorationSchedule deterministic(double a) { return {Mode::Deterministic, a}; }
  static ExplorationSchedule probabilistic(double a) { return {Mode::Probabilistic, a}; }
  void validate() const;
};

/// ceil(exp(a * m^(1/9))), saturating at UINT64_MAX.
std::uint64_t schedule_time(double a, std::uint64_t m);

/// The smallest 0-based alternative k with n in T_{k+1}, if any. Membership
/// is decided by inverting the time formula over the lattice of multiples of
/// k + 2, never by scanning m.
std::optional<Index> forced_alternative(double a, long n, Index K);

/// min(1, ((ln n)/a)^9 / n); zero for n <= 1.
double exploration_probability(double a, long n);

/// Consumes exactly one uniform per call, plus one index draw when it fires.
std::optional<Index> maybe_explore(double a, long n, Index K, Xoshiro256& rng);

struct Selection {
  Index chosen = 0;   ///< alternative actually sampled (pi^{n+1})
  Index plug_in = 0;  ///< argmin_j beta_hat_j^T x - g_j (pi-hat^{n+1})
  bool explored = false;
};

/// The semi-myopic rule: the forced alternative if the schedule fires at n,
/// otherwise the plug-in decision.
template <CostModel Model, typename XDerived>
Selection select(const ExplorationSchedule& schedule, const Model& model_hat, const DualWeights& g,
                 const Eigen::MatrixBase<XDerived>& x, long n, Xoshiro256& rng) {
  Selection s;
  s.plug_in = decide(model_hat, g, x);
  const Index K = model_hat.alternatives();
  const std::optional<Index> forced =
      schedule.mode == ExplorationSchedule::Mode::Deterministic
          ? forced_alternative(schedule.a, n, K)
          : maybe_explore(schedule.a, n, K, rng);
  s.explored = forced.has_value();
  s.chosen = forced.value_or(s.plug_in);
  return s;
}

}  // namespace semiot
