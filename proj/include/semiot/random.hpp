#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <Eigen/Core>

namespace semiot {

/// SplitMix64 finalizer; used for seeding and for deriving sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic seed for a named sub-stream of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Stream tags. Each consumer of randomness owns its own stream so that, for
/// example, changing the noise level never perturbs the context sequence.
namespace streams {
inline constexpr std::uint64_t contexts = 0x11;
inline constexpr std::uint64_t noise = 0x22;
inline constexpr std::uint64_t exploration = 0x33;
inline constexpr std::uint64_t instance = 0x44;
inline constexpr std::uint64_t verification = 0x55;
inline constexpr std::uint64_t oracle = 0x66;
}  // namespace streams

/// xoshiro256** 1.0 (Blackman & Vigna). The output sequence for a given seed
/// is part of the reproducibility contract of every file this library writes;
/// `kVersion` is recorded in run manifests and must change with the stream.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kVersion = "xoshiro256starstar-1.0/splitmix64/polar-normal";

  struct State {
    std::array<std::uint64_t, 4> s{};
    bool has_spare = false;
    double spare = 0.0;
  };

  explicit Xoshiro256(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Standard exponential.
  double exponential();

  const State& state() const { return state_; }
  void set_state(const State& st) { state_ = st; }

 private:
  State state_;
};

/// Fills `out` with a point uniform on the unit sphere S^{d-1}.
void sample_unit_sphere(Xoshiro256& rng, Eigen::Ref<Eigen::VectorXd> out);

/// Fills `out` with a point uniform on [0,1]^d.
void sample_unit_box(Xoshiro256& rng, Eigen::Ref<Eigen::VectorXd> out);

/// Uniform point on the probability simplex with `k` entries (normalized
/// exponential spacings). Entries are strictly positive.
Eigen::VectorXd sample_simplex(Xoshiro256& rng, Eigen::Index k);

}  // namespace semiot
