#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "semiot/errors.hpp"
#include "semiot/random.hpp"
#include "semiot/ridge.hpp"

using namespace semiot;

namespace {

struct Obs {
  Eigen::VectorXd x;
  double w;
};

std::vector<Obs> random_obs(Xoshiro256& rng, Index d, long m, const Eigen::VectorXd& beta, double sigma) {
  std::vector<Obs> out;
  out.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    Eigen::VectorXd x(d);
    sample_unit_sphere(rng, x);
    out.push_back({x, beta.dot(x) + sigma * rng.normal()});
  }
  return out;
}

}  // namespace

TEST_CASE("absorb") {
  RidgeAccumulator acc(3);
  absorb(acc, Eigen::Vector3d::UnitX(), 2.0);
  Eigen::Matrix3d V = Eigen::Matrix3d::Zero();
  V(0, 0) = 1.0;
  CHECK(acc.V == V);
  CHECK(acc.b == Eigen::Vector3d(2, 0, 0));
  CHECK(acc.count == 1);

  RidgeAccumulator twice(3), once(3);
  const Eigen::Vector3d x(0.3, -1.2, 0.5);
  absorb(once, x, 0.7);
  absorb(twice, x, 0.7);
  absorb(twice, x, 0.7);
  CHECK(twice.V == 2.0 * once.V);
  CHECK(twice.b == 2.0 * once.b);

  Xoshiro256 rng(5);
  RidgeAccumulator acc2(4);
  Eigen::MatrixXd brute = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd xx(4);
    for (Index j = 0; j < 4; ++j) xx[j] = rng.normal();
    absorb(acc2, xx, rng.normal());
    brute += xx * xx.transpose();
  }
  CHECK((acc2.V - brute).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((acc2.V - acc2.V.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(acc2.V).eigenvalues().minCoeff() >= -1e-10);
  CHECK(acc2.count == 100);
  CHECK_THROWS_AS(absorb(acc2, Eigen::Vector3d::Zero(), 1.0), ArgumentError);
}

TEST_CASE("solve_beta") {
  RidgeAccumulator empty(4);
  CHECK(solve_beta(empty, 0.5) == Eigen::VectorXd::Zero(4));

  RidgeAccumulator one(2);
  absorb(one, Eigen::Vector2d::UnitX(), 2.0);
  const Eigen::VectorXd b = solve_beta(one, 1.0);
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b[1] == 0.0);

  // noiseless, spanning design
  Xoshiro256 rng(8);
  const Index d = 6;
  Eigen::VectorXd beta(d);
  for (Index j = 0; j < d; ++j) beta[j] = rng.normal();
  RidgeAccumulator acc(d);
  for (const auto& o : random_obs(rng, d, 200, beta, 0.0)) absorb(acc, o.x, o.w);
  CHECK((solve_beta(acc, 1e-9) - beta).norm() <= 1e-6);

  RidgeAccumulator bad(2);
  absorb(bad, Eigen::Vector2d(NAN, 1.0), 1.0);
  CHECK_THROWS_AS(solve_beta(bad, 1.0), NumericError);
  CHECK_THROWS_AS(solve_beta(acc, 0.0), ArgumentError);
}

TEST_CASE("rho schedule") {
  const auto sched = RidgePolicy::paper_schedule();
  CHECK(sched.rho_at(0) == 1.0);
  CHECK(sched.rho_at(1) == 1.0);
  CHECK(sched.rho_at(1000) == doctest::Approx(1.0 + std::pow(std::log(1000.0), 3)));
  CHECK(RidgePolicy::constant(0.001).rho_at(12345) == 0.001);
  CHECK_THROWS_AS(RidgePolicy::constant(-1.0).validate(), ArgumentError);
}

TEST_CASE("shrinkage is monotone in rho") {
  Xoshiro256 rng(13);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(8));
    Eigen::VectorXd beta(d);
    for (Index j = 0; j < d; ++j) beta[j] = rng.normal();
    RidgeAccumulator acc(d);
    for (const auto& o : random_obs(rng, d, 1 + static_cast<long>(rng.below(30)), beta, 0.3)) absorb(acc, o.x, o.w);
    const double n1 = solve_beta(acc, 1e-3).norm(), n2 = solve_beta(acc, 1.0).norm(), n3 = solve_beta(acc, 1e3).norm();
    CHECK(n1 >= n2);
    CHECK(n2 >= n3);
  }
}

TEST_CASE("RLS matches the batch solve") {
  CHECK_THROWS_AS(RLSState(3, RidgePolicy::paper_schedule()), UnsupportedMode);
  RLSState zero(3, RidgePolicy::constant(0.001));
  CHECK(zero.beta == Eigen::VectorXd::Zero(3));

  RLSState single(2, RidgePolicy::constant(1.0));
  rls_update(single, Eigen::Vector2d::UnitX(), 2.0);
  CHECK(single.beta[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(single.beta[1]) < 1e-15);

  Xoshiro256 rng(31);
  for (Index d : {3, 10}) {
    Eigen::VectorXd beta(d);
    for (Index j = 0; j < d; ++j) beta[j] = rng.normal();
    const auto obs = random_obs(rng, d, 10000, beta, 0.2);
    RidgeAccumulator acc(d);
    RLSState rls(d, RidgePolicy::constant(0.001));
    for (const auto& o : obs) {
      absorb(acc, o.x, o.w);
      rls_update(rls, o.x, o.w);
    }
    const Eigen::VectorXd batch = solve_beta(acc, 0.001);
    CHECK((rls.beta - batch).norm() <= 1e-8 * (1.0 + batch.norm()));
    CHECK(rls.count == 10000);

    // permutation invariance
    std::vector<std::size_t> idx(obs.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
    RidgeAccumulator acc2(d);
    RLSState rls2(d, RidgePolicy::constant(0.001));
    for (std::size_t i : idx) {
      absorb(acc2, obs[i].x, obs[i].w);
      rls_update(rls2, obs[i].x, obs[i].w);
    }
    CHECK((solve_beta(acc2, 0.001) - batch).norm() <= 1e-10 * (1.0 + batch.norm()));
    CHECK((rls2.beta - rls.beta).norm() <= 1e-8 * (1.0 + batch.norm()));
  }
}

TEST_CASE("round-robin consistency rate") {
  // ||beta_hat - beta|| at n in [1e2, 1e4], averaged over replications,
  // should fall like n^-1/2.
  Xoshiro256 rng(77);
  const Index d = 5;
  std::vector<double> ns, errs;
  for (long n = 100; n <= 10000; n = static_cast<long>(n * 1.5849)) ns.push_back(double(n));
  errs.assign(ns.size(), 0.0);
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    Eigen::VectorXd beta(d);
    sample_unit_sphere(rng, beta);
    RLSState rls(d, RidgePolicy::constant(0.001));
    std::size_t next = 0;
    for (long n = 1; next < ns.size(); ++n) {
      Eigen::VectorXd x(d);
      sample_unit_sphere(rng, x);
      rls_update(rls, x, beta.dot(x) + 0.2 * rng.normal());
      if (n == static_cast<long>(ns[next])) errs[next++] += (rls.beta - beta).norm() / reps;
    }
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(ns[i]) / ns.size();
    my += std::log(errs[i]) / ns.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (std::log(ns[i]) - mx) * (std::log(errs[i]) - my);
    sxx += (std::log(ns[i]) - mx) * (std::log(ns[i]) - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(-0.5).epsilon(0.4));
}
