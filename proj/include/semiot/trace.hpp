#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "semiot/core.hpp"
#include "semiot/instance.hpp"

namespace semiot {

/// Ground truth needed to score a run: the true cost coefficients (in the
/// learner's feature space) and the normalized optimal dual weights.
struct Truth {
  LinearCostModel model;
  DualWeights g_star;
};

struct TraceRow {
  long n = 0;               ///< 1-based time of the decision
  std::uint64_t x_hash = 0; ///< FNV-1a of the raw context bytes
  Index pi = 0;
  Index pi_hat = 0;
  bool explored = false;
  double w = 0.0;
  int correct = -1;  ///< 1{pi_hat = pi*(x)}; -1 when no truth was available
  double delta_norm = std::numeric_limits<double>::quiet_NaN();
  double Delta_max = std::numeric_limits<double>::quiet_NaN();
};

/// Iterates kept for later scoring.
struct Snapshot {
  long n = 0;
  DualWeights g;
  Eigen::MatrixXd beta_hat;  ///< empty for known-cost runs
};

/// Per-iteration log of one run. The contexts themselves are not stored; they
/// are replayable from the sampler spec and context seed.
struct RunTrace {
  SamplerSpec sampler;
  std::uint64_t context_seed = 0;
  std::vector<TraceRow> rows;
  std::vector<Snapshot> snapshots;
};

std::uint64_t context_hash(const Eigen::Ref<const Eigen::VectorXd>& x);

/// CSV: n,x_hash,pi,pi_hat,explored,correct,delta_norm,Delta_max with 1-based
/// alternatives; unknown values are left empty.
void write_run_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace semiot
