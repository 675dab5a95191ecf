#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semiot/core.hpp"
#include "semiot/exploration.hpp"
#include "semiot/instance.hpp"
#include "semiot/ridge.hpp"
#include "semiot/sa.hpp"
#include "semiot/trace.hpp"

namespace semiot {

struct LearnerConfig {
  double alpha = 50.0;
  ExplorationSchedule schedule = ExplorationSchedule::probabilistic(4.5);
  RidgePolicy ridge = RidgePolicy::constant(0.001);
  std::uint64_t seed = 0;
  DualWeights g0;  ///< empty means zero

  void validate() const;
};

/// Coupled online state: dual weights, per-alternative regression state, and
/// the three random streams (contexts, noise, exploration).
struct LearnerState {
  long n = 0;
  DualWeights g;
  std::vector<RidgeAccumulator> accs;
  std::vector<RLSState> rls;  ///< populated in constant-rho mode only
  LinearCostModel beta_hat;
  ExplorationSchedule schedule;
  RidgePolicy ridge;
  double alpha = 50.0;
  std::uint64_t context_seed = 0;
  ContextSampler contexts;
  NoiseModel noise;
  Xoshiro256 explore_rng;

  LearnerState(Index K, Index feature_dim, SamplerSpec sampler, NoiseSpec noise_spec,
               const LearnerConfig& config);

  Index alternatives() const { return beta_hat.alternatives(); }
};

struct StepRecord {
  long n = 0;  ///< 1-based time of this decision
  Eigen::VectorXd x;         ///< raw context
  Eigen::VectorXd features;  ///< regression features (equal to x for linear costs)
  Index pi = 0;
  Index pi_hat = 0;
  bool explored = false;
  double w = 0.0;  ///< regression response absorbed for alternative pi
};

/// Observation model of a plain linear instance: features are the contexts
/// and W = beta_k^T x + eps.
struct LinearObservation {
  const TransportInstance& instance;

  Index alternatives() const { return instance.K; }
  Index feature_dimension() const { return instance.d; }
  const Eigen::VectorXd& targets() const { return instance.p; }
  void features(const Eigen::VectorXd& x, Eigen::VectorXd& out) const { out = x; }
  double observe(Index k, const Eigen::VectorXd& x, double eps) const {
    return instance.costs.beta.row(k).dot(x) + eps;
  }
};

template <typename Obs>
concept ObservationModel = requires(const Obs& o, const Eigen::VectorXd& x, Eigen::VectorXd& f) {
  { o.alternatives() } -> std::convertible_to<Index>;
  { o.feature_dimension() } -> std::convertible_to<Index>;
  { o.targets() } -> std::convertible_to<const Eigen::VectorXd&>;
  o.features(x, f);
  { o.observe(Index{0}, x, 0.0) } -> std::convertible_to<double>;
};

/// Refreshes beta_hat for alternative k after its accumulator changed.
void refresh_estimate(LearnerState& state, Index k, const Eigen::VectorXd& features, double w);

/// One pass of the online loop:
///  1. draw X^{n+1} and select pi^{n+1} with the semi-myopic rule;
///  2. update g with the plug-in argmin (never the forced alternative);
///  3. observe the selected cost and update that alternative's estimate only;
///  4. advance n.
template <ObservationModel Obs>
StepRecord learner_step(LearnerState& state, const Obs& obs) {
  StepRecord rec;
  rec.x = state.contexts.sample();
  obs.features(rec.x, rec.features);
  const Selection sel =
      select(state.schedule, state.beta_hat, state.g, rec.features, state.n, state.explore_rng);
  sa_update(state.g, obs.targets(), sel.plug_in, sa_stepsize(state.alpha, state.n));
  const double eps = state.noise.draw();
  rec.w = obs.observe(sel.chosen, rec.x, eps);
  refresh_estimate(state, sel.chosen, rec.features, rec.w);
  ++state.n;
  rec.n = state.n;
  rec.pi = sel.chosen;
  rec.pi_hat = sel.plug_in;
  rec.explored = sel.explored;
  return rec;
}

LearnerState make_learner(const TransportInstance& instance, const LearnerConfig& config);
StepRecord learner_step(LearnerState& state, const TransportInstance& instance);

using StepHook = std::function<void(const StepRecord&, const LearnerState&)>;

struct RunOptions {
  /// 0 keeps snapshots at default_trace_point times; -1 keeps none.
  long snapshot_every = 0;
  std::vector<StepHook> hooks;
};

/// max_k ||beta_hat_k - beta_k||.
double max_coefficient_error(const LinearCostModel& estimate, const LinearCostModel& truth);

/// Runs `horizon` learner steps from a fresh state. With `truth`, each row
/// carries the plug-in correct-selection flag and, at snapshot times, the
/// dual-weight and coefficient error norms.
template <ObservationModel Obs>
RunTrace run_learner_with(LearnerState& state, const Obs& obs, long horizon,
                          const std::optional<Truth>& truth, const RunOptions& options = {}) {
  if (horizon < 1) throw ArgumentError("run_learner: horizon must be >= 1");
  RunTrace trace;
  trace.sampler = state.contexts.spec();
  trace.context_seed = state.context_seed;
  trace.rows.reserve(static_cast<std::size_t>(horizon));
  for (long i = 0; i < horizon; ++i) {
    const StepRecord rec = learner_step(state, obs);
    TraceRow row;
    row.n = rec.n;
    row.x_hash = context_hash(rec.x);
    row.pi = rec.pi;
    row.pi_hat = rec.pi_hat;
    row.explored = rec.explored;
    row.w = rec.w;
    const bool snap = options.snapshot_every == 0 ? default_trace_point(rec.n)
                      : options.snapshot_every > 0 ? rec.n % options.snapshot_every == 0
                                                   : false;
    if (truth) {
      row.correct = decide(truth->model, truth->g_star, rec.features) == rec.pi_hat ? 1 : 0;
      if (snap || i + 1 == horizon) {
        row.delta_norm = delta_norm(state.g, truth->g_star);
        row.Delta_max = max_coefficient_error(state.beta_hat, truth->model);
      }
    }
    if (snap) trace.snapshots.push_back({rec.n, state.g, state.beta_hat.beta});
    for (const auto& hook : options.hooks) hook(rec, state);
    trace.rows.push_back(row);
  }
  return trace;
}

RunTrace run_learner(const TransportInstance& instance, const LearnerConfig& config, long horizon,
                     const std::optional<Truth>& truth = std::nullopt, const RunOptions& options = {});

inline constexpr std::string_view kCheckpointSchema = "semiot-checkpoint-v1";

/// Versioned JSON snapshot of the complete learner state, random streams
/// included. Doubles are written in shortest round-trip form.
std::string checkpoint(const LearnerState& state);

/// Overwrites `state` (built from the same instance and config) with the
/// checkpointed values. Throws CheckpointVersionError on a schema or
/// rho-mode mismatch and CorruptCheckpoint on unparsable or inconsistent data.
void restore_into(LearnerState& state, std::string_view blob);

LearnerState restore(std::string_view blob, const TransportInstance& instance,
                     const LearnerConfig& config);

}  // namespace semiot
