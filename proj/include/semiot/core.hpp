#pragma once

// Cost models, the dual-weighted decision rule, and the per-sample dual
// objective. Everything here is a free function templated on the Eigen
// expression types it receives, so callers can pass blocks, maps and
// expressions without materializing temporaries.

#include <concepts>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "semiot/errors.hpp"

namespace semiot {

using Eigen::Index;

/// Linear costs c_k(x) = beta_k^T x; row k of `beta` holds beta_k.
template <typename Scalar_>
struct LinearCostModelT {
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix beta;

  LinearCostModelT() = default;
  explicit LinearCostModelT(Matrix coefficients) : beta(std::move(coefficients)) {}

  Index alternatives() const { return beta.rows(); }
  Index dimension() const { return beta.cols(); }

  /// Costs of every alternative. Accepts a single context (d-vector) or a
  /// batch of contexts stored column-wise (d x B), returning K or K x B.
  template <typename Derived>
  auto costs(const Eigen::MatrixBase<Derived>& x) const {
    return (beta * x).eval();
  }

  bool all_finite() const { return beta.allFinite(); }
};

using LinearCostModel = LinearCostModelT<double>;

/// Dual weights g (bonuses/penalties subtracted from the costs).
using DualWeights = Eigen::VectorXd;

/// Anything that maps a context to a K-vector of costs.
template <typename M>
concept CostModel = requires(const M& m, const Eigen::VectorXd& x) {
  { m.alternatives() } -> std::convertible_to<Index>;
  { m.dimension() } -> std::convertible_to<Index>;
  m.costs(x);
};

/// argmin_k (costs_k - g_k); ties resolve to the smallest index.
template <typename CostDerived, typename WeightDerived>
Index argmin_adjusted(const Eigen::MatrixBase<CostDerived>& costs,
                      const Eigen::MatrixBase<WeightDerived>& g) {
  using Scalar = typename CostDerived::Scalar;
  Index best = 0;
  Scalar best_value = costs.coeff(0) - g.coeff(0);
  for (Index k = 1; k < costs.size(); ++k) {
    const Scalar value = costs.coeff(k) - g.coeff(k);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  return best;
}

namespace detail {
template <typename Model, typename GDerived, typename XDerived>
void check_shapes(const Model& model, const Eigen::MatrixBase<GDerived>& g,
                  const Eigen::MatrixBase<XDerived>& x) {
  if (g.size() != model.alternatives())
    throw ArgumentError("dual weights have " + std::to_string(g.size()) + " entries, expected " +
                        std::to_string(model.alternatives()));
  if (x.size() != model.dimension())
    throw ArgumentError("context has dimension " + std::to_string(x.size()) + ", expected " +
                        std::to_string(model.dimension()));
}
}  // namespace detail

template <typename Scalar, typename XDerived>
Scalar evaluate_cost(const LinearCostModelT<Scalar>& model, const Eigen::MatrixBase<XDerived>& x,
                     Index k) {
  if (k < 0 || k >= model.alternatives())
    throw ArgumentError("alternative index " + std::to_string(k) + " out of range [0, " +
                        std::to_string(model.alternatives()) + ")");
  if (x.size() != model.dimension()) throw ArgumentError("context dimension mismatch");
  return model.beta.row(k).dot(x);
}

/// The dual-weighted decision rule argmin_j c_j(x) - g_j (0-based index).
template <CostModel Model, typename GDerived, typename XDerived>
Index decide(const Model& model, const Eigen::MatrixBase<GDerived>& g,
             const Eigen::MatrixBase<XDerived>& x) {
  detail::check_shapes(model, g, x);
  return argmin_adjusted(model.costs(x), g);
}

/// F(g, x) = min_j c_j(x) - g_j.
template <CostModel Model, typename GDerived, typename XDerived>
double dual_objective_sample(const Model& model, const Eigen::MatrixBase<GDerived>& g,
                             const Eigen::MatrixBase<XDerived>& x) {
  detail::check_shapes(model, g, x);
  const auto c = model.costs(x);
  return (c - g).minCoeff();
}

}  // namespace semiot
