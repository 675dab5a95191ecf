#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semiot/core.hpp"
#include "semiot/instance.hpp"
#include "semiot/sa.hpp"
#include "semiot/trace.hpp"

namespace semiot {

struct OracleOptions {
  long iterations = 10'000'000;
  double tail_fraction = 0.5;
  double tolerance = 0.01;
  long check_samples = 1'000'000;
  double alpha = 50.0;
  /// Oracle stepsize is alpha / (n + 1 + stepsize_offset). The offset keeps
  /// the first steps at the cost scale; with offset 0 an early step can push
  /// a small-p_k alternative so far down that recovery takes ~exp(1/p_k)
  /// iterations.
  double stepsize_offset = 100.0;
  std::uint64_t seed = 0;
};

struct OracleResult {
  enum class Method { LongSA, QuantileK2 };
  DualWeights g_star;  ///< normalized: g_star[0] == 0
  Method method = Method::LongSA;
  long iterations = 0;  ///< SA iterations or quantile samples
  Eigen::VectorXd residual;  ///< |p_hat_k - p_k| at g_star
  std::uint64_t seed = 0;
};

struct TargetCheck {
  bool pass = false;
  Eigen::VectorXd residual;
};

/// Assignment proportions at g versus the targets p.
template <CostModel Model>
TargetCheck verify_targets(const Model& model, const DualWeights& g, const Eigen::VectorXd& p,
                           const SamplerSpec& sampler, std::uint64_t seed, long n_samples, double tol) {
  ContextSampler s(sampler, seed);
  TargetCheck check;
  check.residual = (estimate_assignment_probs(model, g, s, n_samples) - p).cwiseAbs();
  check.pass = check.residual.maxCoeff() <= tol;
  return check;
}

/// Brute-force g*: runs the known-cost recursion for options.iterations
/// steps and averages the final tail_fraction of iterates. The tail average
/// is an oracle-only variance reduction. Throws OracleFailure when the
/// assignment residual on fresh samples exceeds options.tolerance.
template <CostModel Model>
OracleResult solve_gstar_long_sa(const Model& model, const Eigen::VectorXd& p, const SamplerSpec& sampler,
                                 const OracleOptions& opt) {
  if (opt.iterations < 1) throw ArgumentError("oracle: iterations must be >= 1");
  if (!(opt.tail_fraction > 0.0 && opt.tail_fraction <= 1.0))
    throw ArgumentError("oracle: tail_fraction must lie in (0, 1]");
  if (p.size() != model.alternatives()) throw ArgumentError("oracle: p size mismatch");
  if (!(opt.stepsize_offset >= 0.0)) throw ArgumentError("oracle: stepsize_offset must be non-negative");
  const Index K = model.alternatives();
  ContextSampler contexts(sampler, derive_seed(opt.seed, streams::oracle));
  DualWeights g = DualWeights::Zero(K);
  DualWeights tail_sum = DualWeights::Zero(K);
  const long tail_start =
      opt.iterations - std::max<long>(1, static_cast<long>(opt.tail_fraction * static_cast<double>(opt.iterations)));
  constexpr Index kBlock = 4096;
  Eigen::MatrixXd xs(model.dimension(), kBlock);
  long n = 0;
  while (n < opt.iterations) {
    const Index b = static_cast<Index>(std::min<long>(kBlock, opt.iterations - n));
    contexts.sample_batch(xs.leftCols(b));
    const Eigen::MatrixXd costs = model.costs(xs.leftCols(b));
    for (Index j = 0; j < b; ++j, ++n) {
      sa_update(g, p, argmin_adjusted(costs.col(j), g),
                opt.alpha / (static_cast<double>(n + 1) + opt.stepsize_offset));
      if (n + 1 > tail_start) tail_sum += g;
    }
  }
  OracleResult result;
  result.method = OracleResult::Method::LongSA;
  result.iterations = opt.iterations;
  result.seed = opt.seed;
  result.g_star = normalized(tail_sum / static_cast<double>(opt.iterations - tail_start));
  const TargetCheck check = verify_targets(model, result.g_star, p, sampler,
                                           derive_seed(opt.seed, streams::verification), opt.check_samples,
                                           opt.tolerance);
  result.residual = check.residual;
  if (!check.pass)
    throw OracleFailure("oracle: assignment residual " + std::to_string(check.residual.maxCoeff()) +
                        " exceeds tolerance " + std::to_string(opt.tolerance));
  return result;
}

OracleResult solve_gstar_long_sa(const TransportInstance& instance, const OracleOptions& opt);

/// Independent K = 2 oracle: g*_2 - g*_1 is the p_2-quantile of
/// Z = c_2(X) - c_1(X), read off `n_samples` sorted draws.
template <CostModel Model>
OracleResult solve_gstar_quantile_k2(const Model& model, const Eigen::VectorXd& p, const SamplerSpec& sampler,
                                     long n_samples, std::uint64_t seed) {
  if (model.alternatives() != 2) throw UnsupportedMode("quantile oracle requires K = 2");
  if (n_samples < 1) throw ArgumentError("quantile oracle: n_samples must be >= 1");
  ContextSampler contexts(sampler, derive_seed(seed, streams::oracle));
  std::vector<double> z(static_cast<std::size_t>(n_samples));
  Eigen::VectorXd x(model.dimension());
  for (auto& v : z) {
    contexts.sample(x);
    const auto c = model.costs(x);
    v = c[1] - c[0];
  }
  const auto rank = static_cast<std::size_t>(
      std::clamp<long>(static_cast<long>(std::ceil(p[1] * static_cast<double>(n_samples))) - 1, 0, n_samples - 1));
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(rank), z.end());
  OracleResult result;
  result.method = OracleResult::Method::QuantileK2;
  result.iterations = n_samples;
  result.seed = seed;
  result.g_star = DualWeights::Zero(2);
  result.g_star[1] = z[rank];
  ContextSampler check(sampler, derive_seed(seed, streams::verification));
  result.residual = (estimate_assignment_probs(model, result.g_star, check, n_samples) - p).cwiseAbs();
  return result;
}

OracleResult solve_gstar_quantile_k2(const TransportInstance& instance, long n_samples, std::uint64_t seed);

std::string oracle_to_json(const OracleResult& result);
OracleResult oracle_from_json(std::string_view text);

struct ScoreReport {
  std::vector<long> n;
  std::vector<std::uint8_t> correct_plugin;
  std::vector<std::uint8_t> correct_policy;
  std::vector<double> pcs_plugin_window;
  std::vector<double> pcs_policy_window;
  std::vector<long> cumulative_incorrect_plugin;
  std::vector<long> cumulative_incorrect_policy;
  std::vector<long> snapshot_n;
  std::vector<double> delta_norm;
  std::vector<double> Delta_max;  ///< NaN for known-cost traces
};

/// Trailing moving average over at most `window` entries.
std::vector<double> windowed_mean(const std::vector<std::uint8_t>& flags, long window);

/// Scores a run against the truth by replaying its contexts. Pure function
/// of its inputs. Throws ArgumentError without truth or when the replayed
/// contexts do not match the trace's hashes.
ScoreReport score_run(const RunTrace& trace, const std::optional<Truth>& truth, long window = 100);

/// CSV: n,correct_plugin,correct_policy,pcs_plugin_window,pcs_policy_window,
/// cum_incorrect_plugin,cum_incorrect_policy.
void write_score_csv(std::ostream& out, const ScoreReport& report);

}  // namespace semiot
