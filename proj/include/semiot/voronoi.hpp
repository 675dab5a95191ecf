#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "semiot/core.hpp"
#include "semiot/instance.hpp"
#include "semiot/learner.hpp"
#include "semiot/oracle.hpp"

namespace semiot {

/// K facilities in the unit square; contexts are uniform on [0,1]^2 and the
/// observed cost of facility k is ||X - x_k|| + eps with eps ~ N(0, sigma^2).
struct FacilityInstance {
  Eigen::Matrix2Xd locations;  ///< 2 x K
  Eigen::VectorXd p;
  double sigma = 0.02;
  std::uint64_t seed = 0;

  Index alternatives() const { return locations.cols(); }
  SamplerSpec sampler() const { return {SamplerKind::UnitBox, 2, {}}; }
  void validate() const;
};

inline constexpr std::string_view kFacilitySchema = "semiot-facility-v1";

std::string facility_to_json(const FacilityInstance& f);
FacilityInstance facility_from_json(std::string_view text);
FacilityInstance load_facility(const std::filesystem::path& path);

/// Features (1, -2 x1, -2 x2).
Eigen::Vector3d distance_features(const Eigen::Vector2d& x);

struct TransformedObservation {
  Eigen::Vector3d features;
  double response = 0.0;
};

/// (x, w) -> (features, w^2 - ||x||^2).
TransformedObservation transform_observation(const Eigen::Vector2d& x, double w);

/// Coefficients of the linearized squared-distance cost: (noise_var + ||x_k||^2, x_k).
LinearCostModel true_feature_model(const FacilityInstance& f, double noise_var);

struct LocationEstimate {
  Eigen::Vector2d location;
  double intercept_residual = 0.0;  ///< beta_0 - (noise_var + ||x_hat||^2)
};

LocationEstimate extract_location(const Eigen::Vector3d& beta_hat, double noise_var = 0.0);

/// Linear model over distance features, evaluated on raw 2-D contexts.
struct FeatureLinearModel {
  LinearCostModel inner;  ///< K x 3

  Index alternatives() const { return inner.alternatives(); }
  Index dimension() const { return 2; }

  template <typename Derived>
  auto costs(const Eigen::MatrixBase<Derived>& x) const {
    const auto& b = inner.beta;
    // beta_0 - 2 beta_1 x1 - 2 beta_2 x2, column-wise for batches.
    Eigen::MatrixXd out = (-2.0 * b.rightCols(2)) * x;
    out.colwise() += b.col(0);
    if constexpr (Derived::ColsAtCompileTime == 1)
      return Eigen::VectorXd(out.col(0));
    else
      return out;
  }
};

/// Euclidean distance to each facility.
struct DistanceCostModel {
  Eigen::Matrix2Xd locations;

  Index alternatives() const { return locations.cols(); }
  Index dimension() const { return 2; }

  template <typename Derived>
  auto costs(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::MatrixXd out(locations.cols(), x.cols());
    for (Index j = 0; j < x.cols(); ++j)
      out.col(j) = (locations.colwise() - x.col(j)).colwise().norm().transpose();
    if constexpr (Derived::ColsAtCompileTime == 1)
      return Eigen::VectorXd(out.col(0));
    else
      return out;
  }
};

/// Squared distance plus a constant, i.e. the power-diagram cost.
struct PowerCostModel {
  Eigen::Matrix2Xd locations;
  double offset = 0.0;

  Index alternatives() const { return locations.cols(); }
  Index dimension() const { return 2; }

  template <typename Derived>
  auto costs(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::MatrixXd out(locations.cols(), x.cols());
    for (Index j = 0; j < x.cols(); ++j)
      out.col(j) = (locations.colwise() - x.col(j)).colwise().squaredNorm().transpose().array() + offset;
    if constexpr (Derived::ColsAtCompileTime == 1)
      return Eigen::VectorXd(out.col(0));
    else
      return out;
  }
};

/// Learner observation adapter: the response handed to the regression is
/// the transformed w^2 - ||x||^2.
struct FacilityObservation {
  const FacilityInstance& facility;

  Index alternatives() const { return facility.alternatives(); }
  Index feature_dimension() const { return 3; }
  const Eigen::VectorXd& targets() const { return facility.p; }
  void features(const Eigen::VectorXd& x, Eigen::VectorXd& out) const { out = distance_features(x); }
  double observe(Index k, const Eigen::VectorXd& x, double eps) const {
    const double w = (x - facility.locations.col(k)).norm() + eps;
    return transform_observation(x, w).response;
  }
};

/// resolution x resolution cell labels, row-major; row 0 is the top (y near 1).
struct Partition {
  int resolution = 0;
  std::vector<Index> cells;

  Index at(int row, int col) const { return cells[static_cast<std::size_t>(row) * resolution + col]; }
};

inline Eigen::Vector2d cell_center(int row, int col, int resolution) {
  return {(col + 0.5) / resolution, (resolution - 1 - row + 0.5) / resolution};
}

template <CostModel Model>
Partition rasterize_partition(const Model& model, const DualWeights& g, int resolution) {
  if (resolution < 16) throw ArgumentError("rasterize_partition: resolution must be >= 16");
  if (model.dimension() != 2) throw ArgumentError("rasterize_partition: model must take 2-D contexts");
  if (g.size() != model.alternatives()) throw ArgumentError("dual weights size mismatch");
  Partition part{resolution, std::vector<Index>(static_cast<std::size_t>(resolution) * resolution)};
  Eigen::Matrix2Xd row_pts(2, resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) row_pts.col(j) = cell_center(i, j, resolution);
    const Eigen::MatrixXd c = model.costs(row_pts);
    for (int j = 0; j < resolution; ++j)
      part.cells[static_cast<std::size_t>(i) * resolution + j] = argmin_adjusted(c.col(j), g);
  }
  return part;
}

/// Fraction of cells whose labels differ.
double hamming_fraction(const Partition& a, const Partition& b);

/// Grey level k * 255 / (K - 1).
void write_partition_pgm(const std::filesystem::path& path, const Partition& part, Index K);
/// One CSV record per raster row, 1-based labels.
void write_partition_csv(std::ostream& out, const Partition& part);

/// Facilities jittered around the four quadrant centres, balanced p.
FacilityInstance generate_separated_facilities(std::uint64_t seed, double sigma = 0.02, double jitter = 0.08);

struct PartitionCheckpoint {
  long n = 0;
  double pcs_linear = 0.0;    ///< plug-in vs linear-world pi*
  double pcs_distance = 0.0;  ///< plug-in vs Euclidean additively weighted pi*
  double hamming = 0.0;       ///< learned vs true linear-world raster
  Eigen::VectorXd location_error;
  double Delta_max = 0.0;
  DualWeights g;
  LinearCostModel beta_hat;
};

struct PartitionConfig {
  LearnerConfig learner;
  std::vector<long> checkpoints{10'000, 100'000, 1'000'000};
  int resolution = 512;
  long pcs_samples = 100'000;
  OracleOptions oracle;
};

struct PartitionResult {
  LearnerState state;
  RunTrace trace;
  LinearCostModel truth_model;
  DualWeights g_linear_star;
  DualWeights g_distance_star;
  Partition true_partition;
  std::vector<PartitionCheckpoint> checkpoints;
};

/// Runs the learner on the transformed model for `horizon` steps. The linear-
/// world oracle g* uses E(eps^2) = sigma^2 in the true intercepts; the
/// Euclidean-world g* is solved separately for reporting.
PartitionResult run_partition_learning(const FacilityInstance& facility, long horizon, const PartitionConfig& cfg);

/// n,facility,error CSV rows for every checkpoint.
void write_location_error_csv(std::ostream& out, const std::vector<PartitionCheckpoint>& cps);

}  // namespace semiot
