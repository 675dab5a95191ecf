#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "semiot/core.hpp"
#include "semiot/instance.hpp"

namespace semiot {

/// Known-cost stochastic approximation with stepsize alpha / (n + 1).
struct SAConfig {
  double alpha = 50.0;
  DualWeights g0;  ///< empty means the zero vector
  long n_iters = 1000;
};

/// Shift g so that its first entry is zero; dual weights are only defined up
/// to a common constant.
inline DualWeights normalized(const DualWeights& g) {
  return (g.array() - g[0]).matrix();
}

/// ||normalized(g) - g_star|| with g_star already normalized.
inline double delta_norm(const DualWeights& g, const DualWeights& g_star) {
  return (normalized(g) - g_star).norm();
}

/// In-place gradient step: g_k += alpha_n * (p_k - 1{k = selected}).
template <typename GDerived, typename PDerived>
void sa_update(Eigen::MatrixBase<GDerived>& g, const Eigen::MatrixBase<PDerived>& p, Index selected,
               double alpha_n) {
  g += alpha_n * p;
  g.coeffRef(selected) -= alpha_n;
}

/// One step of the known-cost recursion at context x.
template <CostModel Model, typename XDerived>
DualWeights sa_step(const DualWeights& g, const Eigen::MatrixBase<XDerived>& x, const Model& model,
                    const Eigen::VectorXd& p, double alpha_n) {
  if (p.size() != g.size()) throw ArgumentError("sa_step: p and g sizes differ");
  if (!(alpha_n >= 0.0)) throw ArgumentError("sa_step: stepsize must be non-negative");
  DualWeights next = g;
  sa_update(next, p, decide(model, g, x), alpha_n);
  return next;
}

inline double sa_stepsize(double alpha, long n) { return alpha / static_cast<double>(n + 1); }

/// Trace sampling used when no explicit stride is requested: every iteration
/// up to 10^4, then 900 evenly spaced points per decade.
bool default_trace_point(long n);

struct SATrace {
  std::vector<long> n;
  std::vector<DualWeights> g;
  std::vector<double> delta_norm;  ///< filled only when g* was supplied
};

struct SAResult {
  DualWeights g;
  SATrace trace;
};

/// Runs the recursion for cfg.n_iters steps on contexts drawn from
/// `sampler`. `trace_every == 0` selects default_trace_point; otherwise every
/// trace_every-th iterate is kept. The initial and final iterates are always
/// kept.
template <CostModel Model>
SAResult run_sa(const Model& model, const Eigen::VectorXd& p, ContextSampler& sampler,
                const SAConfig& cfg, long trace_every = 0,
                const std::optional<DualWeights>& g_star = std::nullopt) {
  if (cfg.n_iters < 1) throw ArgumentError("run_sa: n_iters must be >= 1");
  if (!(cfg.alpha > 0.0)) throw ArgumentError("run_sa: alpha must be positive");
  if (p.size() != model.alternatives()) throw ArgumentError("run_sa: p size mismatch");
  if (trace_every < 0) throw ArgumentError("run_sa: trace_every must be non-negative");

  SAResult result;
  result.g = cfg.g0.size() == 0 ? DualWeights::Zero(model.alternatives()) : cfg.g0;
  if (result.g.size() != model.alternatives()) throw ArgumentError("run_sa: g0 size mismatch");

  auto record = [&](long n) {
    result.trace.n.push_back(n);
    result.trace.g.push_back(result.g);
    if (g_star) result.trace.delta_norm.push_back(delta_norm(result.g, *g_star));
  };
  record(0);
  Eigen::VectorXd x(model.dimension());
  for (long n = 0; n < cfg.n_iters; ++n) {
    sampler.sample(x);
    sa_update(result.g, p, argmin_adjusted(model.costs(x), result.g), sa_stepsize(cfg.alpha, n));
    const long done = n + 1;
    const bool keep = trace_every == 0 ? default_trace_point(done) : done % trace_every == 0;
    if (keep || done == cfg.n_iters) record(done);
  }
  return result;
}

/// Instance overload: contexts come from the instance sampler seeded with
/// derive_seed(seed, streams::contexts).
SAResult run_sa(const TransportInstance& instance, const SAConfig& cfg, long trace_every,
                std::uint64_t seed, const std::optional<DualWeights>& g_star = std::nullopt);

/// CSV with header n,g_1..g_K[,delta_norm].
void write_sa_trace_csv(std::ostream& out, const SATrace& trace);

}  // namespace semiot
