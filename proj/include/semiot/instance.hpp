#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "semiot/core.hpp"
#include "semiot/random.hpp"

namespace semiot {

enum class SamplerKind { UnitSphere, UnitBox, Replay };

/// Distribution of the contexts X. `points` (d x m, column-wise) is used only
/// by the replay kind, which cycles through a user-supplied stream.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::UnitSphere;
  Index dimension = 1;
  Eigen::MatrixXd points;
};

/// Single-owner cursor over a context stream.
class ContextSampler {
 public:
  struct State {
    Xoshiro256::State rng;
    Index cursor = 0;
  };

  ContextSampler(SamplerSpec spec, std::uint64_t seed);

  Index dimension() const { return spec_.dimension; }
  const SamplerSpec& spec() const { return spec_; }

  void sample(Eigen::Ref<Eigen::VectorXd> out);
  Eigen::VectorXd sample();
  /// Fills the columns of `out` (d x B) with consecutive samples.
  void sample_batch(Eigen::Ref<Eigen::MatrixXd> out);

  State state() const { return {rng_.state(), cursor_}; }
  void set_state(const State& st);

 private:
  SamplerSpec spec_;
  Xoshiro256 rng_;
  Index cursor_ = 0;
};

enum class NoiseKind { None, Gaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double sigma = 0.0;

  static NoiseSpec gaussian(double sigma) { return {NoiseKind::Gaussian, sigma}; }
  static NoiseSpec none() { return {}; }
};

/// Single-owner cursor over observation noise. A Gaussian stream always
/// consumes one standard normal per draw and scales it by sigma, so runs at
/// different noise levels share the same underlying variates.
class NoiseModel {
 public:
  NoiseModel(NoiseSpec spec, std::uint64_t seed);

  double draw();
  const NoiseSpec& spec() const { return spec_; }

  Xoshiro256::State state() const { return rng_.state(); }
  void set_state(const Xoshiro256::State& st) { rng_.set_state(st); }

 private:
  NoiseSpec spec_;
  Xoshiro256 rng_;
};

struct TransportInstance {
  Index d = 0;
  Index K = 0;
  Eigen::VectorXd p;
  LinearCostModel costs;
  SamplerSpec sampler;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  /// Throws ArgumentError unless every structural invariant holds. K = 1 is
  /// accepted as a degenerate harness; instance files require K >= 2.
  void validate() const;
};

inline constexpr std::string_view kInstanceSchema = "semiot-instance-v1";

std::string instance_to_json(const TransportInstance& instance);
/// Parses and validates an instance document; throws InputError.
TransportInstance instance_from_json(std::string_view text);
TransportInstance load_instance(const std::filesystem::path& path);
void save_instance(const TransportInstance& instance, const std::filesystem::path& path);

/// Monte Carlo estimate of P(decide(X) = k) over `n_samples` contexts.
/// Counts are normalized, so the entries sum to one.
template <CostModel Model>
Eigen::VectorXd estimate_assignment_probs(const Model& model, const DualWeights& g,
                                          ContextSampler& sampler, long n_samples) {
  if (n_samples < 1) throw ArgumentError("estimate_assignment_probs: n_samples must be >= 1");
  if (g.size() != model.alternatives()) throw ArgumentError("dual weights size mismatch");
  if (sampler.dimension() != model.dimension()) throw ArgumentError("sampler dimension mismatch");
  constexpr Index kBlock = 4096;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(model.alternatives());
  Eigen::MatrixXd xs(model.dimension(), kBlock);
  long done = 0;
  while (done < n_samples) {
    const Index b = static_cast<Index>(std::min<long>(kBlock, n_samples - done));
    sampler.sample_batch(xs.leftCols(b));
    const Eigen::MatrixXd c = model.costs(xs.leftCols(b));
    for (Index j = 0; j < b; ++j) counts[argmin_adjusted(c.col(j), g)] += 1.0;
    done += b;
  }
  return counts / static_cast<double>(n_samples);
}

}  // namespace semiot
