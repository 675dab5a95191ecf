#include "semiot/ridge.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace semiot {

double RidgePolicy::rho_at(long n) const {
  if (mode == Mode::Constant) return rho;
  if (n <= 1) return 1.0;
  const double l = std::log(static_cast<double>(n));
  return 1.0 + l * l * l;
}

void RidgePolicy::validate() const {
  if (mode == Mode::Constant && !(rho > 0.0)) throw ArgumentError("ridge rho must be positive");
}

Eigen::VectorXd solve_beta(const RidgeAccumulator& acc, double rho) {
  if (!(rho > 0.0)) throw ArgumentError("solve_beta: rho must be positive");
  const Index d = acc.dimension();
  if (acc.count == 0) return Eigen::VectorXd::Zero(d);
  if (!acc.V.allFinite() || !acc.b.allFinite()) throw NumericError("solve_beta: non-finite accumulator");
  Eigen::MatrixXd A = 0.5 * (acc.V + acc.V.transpose());
  A.diagonal().array() += rho;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw NumericError("solve_beta: Cholesky factorization failed");
  Eigen::VectorXd beta = llt.solve(acc.b);
  if (!beta.allFinite()) throw NumericError("solve_beta: non-finite solution");
  return beta;
}

RLSState::RLSState(Index d, const RidgePolicy& policy) {
  if (policy.mode != RidgePolicy::Mode::Constant)
    throw UnsupportedMode("recursive least squares requires a constant rho");
  policy.validate();
  rho = policy.rho;
  P = Eigen::MatrixXd::Identity(d, d) / rho;
  beta = Eigen::VectorXd::Zero(d);
}

void rls_update(RLSState& state, const Eigen::Ref<const Eigen::VectorXd>& x, double w) {
  if (x.size() != state.dimension()) throw ArgumentError("rls_update: dimension mismatch");
  const Eigen::VectorXd Px = state.P * x;
  const double denom = 1.0 + x.dot(Px);
  const Eigen::VectorXd gain = Px / denom;
  state.beta += gain * (w - x.dot(state.beta));
  state.P.noalias() -= gain * Px.transpose();
  state.P = 0.5 * (state.P + state.P.transpose()).eval();
  ++state.count;
  if (!state.beta.allFinite() || !std::isfinite(denom)) throw NumericError("rls_update: non-finite state");
}

}  // namespace semiot
