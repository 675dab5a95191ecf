#include "semiot/random.hpp"

#include <cmath>

#include "semiot/errors.hpp"

namespace semiot {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (stream * 0xd1b54a32d192ed03ULL);
  splitmix64(s);
  return splitmix64(s);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_.s) word = splitmix64(sm);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  auto& s = state_.s;
  const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t Xoshiro256::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Xoshiro256::below: n must be positive");
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = max() - (max() % n);
  std::uint64_t r;
  do {
    r = (*this)();
  } while (r >= limit);
  return r % n;
}

double Xoshiro256::normal() {
  if (state_.has_spare) {
    state_.has_spare = false;
    return state_.spare;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  state_.spare = v * m;
  state_.has_spare = true;
  return u * m;
}

double Xoshiro256::exponential() {
  // 1 - U lies in (0, 1].
  return -std::log(1.0 - uniform());
}

void sample_unit_sphere(Xoshiro256& rng, Eigen::Ref<Eigen::VectorXd> out) {
  double norm2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
    norm2 = out.squaredNorm();
  } while (norm2 == 0.0);
  out /= std::sqrt(norm2);
}

void sample_unit_box(Xoshiro256& rng, Eigen::Ref<Eigen::VectorXd> out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.uniform();
}

Eigen::VectorXd sample_simplex(Xoshiro256& rng, Eigen::Index k) {
  Eigen::VectorXd e(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double v;
    do {
      v = rng.exponential();
    } while (v == 0.0);
    e[i] = v;
  }
  return e / e.sum();
}

}  // namespace semiot
