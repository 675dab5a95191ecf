#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semiot/exploration.hpp"
#include "semiot/instance.hpp"
#include "semiot/learner.hpp"
#include "semiot/oracle.hpp"
#include "semiot/ridge.hpp"

namespace semiot {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Callers write
/// results into per-index slots, so the outcome does not depend on `jobs`.
void parallel_for(long count, int jobs, const std::function<void(long)>& fn);

/// Synthetic linear-cost study: contexts and coefficients uniform on the
/// unit sphere, targets uniform on the simplex, Gaussian noise.
struct SyntheticSpec {
  Index d = 10;
  Index K = 5;
  long n_instances = 100;
  long runs_per_instance = 10;
  long horizon = 1000;
  std::vector<double> noise_sigmas{0.02, 0.2};
  double sa_alpha = 50.0;
  ExplorationSchedule explore = ExplorationSchedule::probabilistic(4.5);
  RidgePolicy ridge = RidgePolicy::constant(0.001);
  std::uint64_t master_seed = 20240601;
  /// p = mix / K + (1 - mix) * (simplex draw); 0 is the plain simplex.
  double p_uniform_mix = 0.0;
  long oracle_iterations = 2'000'000;
  double oracle_tolerance = 0.03;
  long oracle_check_samples = 200'000;
  long pcs_window = 100;

  static SyntheticSpec desk();
  static SyntheticSpec paper();
  void validate() const;
};

inline constexpr std::string_view kConfigSchema = "semiot-config-v1";

std::string spec_to_json(const SyntheticSpec& spec);
/// Keys absent from the document keep the values of `base`.
SyntheticSpec spec_from_json(std::string_view text, const SyntheticSpec& base = SyntheticSpec::desk());

TransportInstance generate_instance(const SyntheticSpec& spec, long index);

OracleOptions oracle_options(const SyntheticSpec& spec, const TransportInstance& instance);

/// Known-cost online recursion with the true coefficients: no exploration, no
/// regression. Contexts use the same stream as a learner run with `seed`.
RunTrace run_benchmark_policy(const TransportInstance& instance, long horizon, double alpha, std::uint64_t seed,
                              const std::optional<Truth>& truth = std::nullopt, long snapshot_every = -1);

struct PcsRow {
  long n = 0;
  std::string policy;
  double sigma = 0.0;
  double pcs = 0.0;
  double se = 0.0;
};

struct TerminalPcs {
  std::string policy;
  double sigma = 0.0;
  double pcs = 0.0;  ///< mean over the final pcs_window steps
  double se = 0.0;   ///< across instances
};

struct RateFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  long points = 0;
};

struct RateRow {
  std::string quantity;
  std::string policy;
  double sigma = 0.0;
  long n_lo = 0;
  long n_hi = 0;
  RateFit fit;
};

struct BenchResult {
  std::vector<TransportInstance> instances;
  std::vector<OracleResult> oracles;
  std::vector<PcsRow> pcs;
  std::vector<TerminalPcs> terminal;
  std::vector<RateRow> rates;

  const TerminalPcs& terminal_for(std::string_view policy, double sigma) const;
};

/// Per-n correct-selection probability averaged over runs then instances, for
/// the benchmark and the semi-myopic plug-in at every noise level. Oracle
/// failures are rethrown with the instance index. When `oracles` is given it
/// must hold one result per instance and no oracle is solved.
BenchResult pcs_trajectory(const SyntheticSpec& spec, int jobs,
                           const std::vector<OracleResult>* oracles = nullptr);

/// OLS of log(value) on log(n) for points with n in [n_lo, n_hi]. Requires
/// at least 10 points and positive values.
RateFit fit_rate(std::span<const double> n, std::span<const double> values, double n_lo = 0.0,
                 double n_hi = std::numeric_limits<double>::infinity());

/// Long-horizon rate study for the known-cost recursion and the learner.
struct RateStudySpec {
  Index d = 10;
  Index K = 3;
  double p_uniform_mix = 0.5;
  long n_instances = 20;
  long runs_per_instance = 2;
  long horizon = 100'000;
  long n_lo = 1000;
  int points_per_decade = 10;
  double sigma = 0.2;
  double sa_alpha = 50.0;
  ExplorationSchedule explore = ExplorationSchedule::probabilistic(4.5);
  RidgePolicy ridge = RidgePolicy::constant(0.001);
  std::uint64_t master_seed = 77;
  long oracle_iterations = 5'000'000;
  double oracle_tolerance = 0.01;
};

struct RateStudyResult {
  std::vector<double> n;
  std::vector<double> sa_delta2;        ///< known-cost mean ||delta^n||^2
  std::vector<double> learner_delta2;   ///< learner mean ||delta^n||^2
  std::vector<double> learner_Delta2;   ///< learner mean max_j ||Delta_j^n||^2
  std::vector<double> pics_plugin;      ///< mean plug-in error rate over (n / 10^(1/ppd), n]
  std::vector<double> cum_incorrect_plugin;
  std::vector<double> cum_incorrect_policy;
  RateFit sa_delta2_fit, learner_delta2_fit, learner_Delta2_fit, pics_fit, cum_plugin_fit, cum_policy_fit;
};

RateStudyResult rate_study(const RateStudySpec& spec, int jobs);

/// Long-format CSV: n,policy,sigma,pcs,se.
void write_pcs_csv(std::ostream& out, const std::vector<PcsRow>& rows);
/// quantity,policy,sigma,n_lo,n_hi,slope,stderr,points.
void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows);

std::vector<RateRow> rate_rows(const RateStudyResult& r, const RateStudySpec& spec);

}  // namespace semiot
