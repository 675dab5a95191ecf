#pragma once

#include <Eigen/Core>

#include "semiot/core.hpp"

namespace semiot {

/// Sufficient statistics of one alternative's observations:
/// V = sum x x^T and b = sum w x over the absorbed (x, w) pairs.
struct RidgeAccumulator {
  Eigen::MatrixXd V;
  Eigen::VectorXd b;
  long count = 0;

  RidgeAccumulator() = default;
  explicit RidgeAccumulator(Index d) : V(Eigen::MatrixXd::Zero(d, d)), b(Eigen::VectorXd::Zero(d)) {}

  Index dimension() const { return b.size(); }
};

template <typename XDerived>
void absorb(RidgeAccumulator& acc, const Eigen::MatrixBase<XDerived>& x, double w) {
  if (x.size() != acc.dimension()) throw ArgumentError("absorb: dimension mismatch");
  acc.V.noalias() += x * x.transpose();
  acc.b += w * x;
  ++acc.count;
}

/// Regularization schedule for the ridge-like estimator.
struct RidgePolicy {
  enum class Mode { PaperSchedule, Constant };
  Mode mode = Mode::Constant;
  double rho = 0.001;  ///< used in Constant mode

  static RidgePolicy paper_schedule() { return {Mode::PaperSchedule, 0.0}; }
  static RidgePolicy constant(double rho) { return {Mode::Constant, rho}; }

  /// rho at global time n: 1 + (ln n)^3 for the schedule (n <= 1 maps to 1),
  /// the constant otherwise.
  double rho_at(long n) const;
  void validate() const;
};

/// (rho I + V)^{-1} b through a Cholesky solve of the symmetrized system.
Eigen::VectorXd solve_beta(const RidgeAccumulator& acc, double rho);

/// Recursive least squares for a fixed rho: maintains P = (rho I + V)^{-1}
/// and the estimate through rank-one updates.
struct RLSState {
  Eigen::MatrixXd P;
  Eigen::VectorXd beta;
  double rho = 0.0;
  long count = 0;

  RLSState() = default;
  /// Throws UnsupportedMode for the growing schedule, whose rho changes every
  /// step and so cannot be folded into a maintained inverse.
  RLSState(Index d, const RidgePolicy& policy);

  Index dimension() const { return beta.size(); }
};

void rls_update(RLSState& state, const Eigen::Ref<const Eigen::VectorXd>& x, double w);

}  // namespace semiot
