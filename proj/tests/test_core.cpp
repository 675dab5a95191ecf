#include <doctest.h>

#include <cmath>
#include <set>

#include "semiot/core.hpp"
#include "semiot/errors.hpp"
#include "semiot/instance.hpp"
#include "semiot/random.hpp"

using namespace semiot;

namespace {

LinearCostModel model_of(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd b(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) b(i, j++) = v;
    ++i;
  }
  return LinearCostModel(b);
}

LinearCostModel random_model(Xoshiro256& rng, Index K, Index d) {
  Eigen::MatrixXd b(K, d);
  for (Index i = 0; i < K; ++i)
    for (Index j = 0; j < d; ++j) b(i, j) = rng.normal();
  return LinearCostModel(b);
}

}  // namespace

TEST_CASE("evaluate_cost") {
  const auto m = model_of({{0.0, 0.0}, {1.0, 0.0}, {0.6, 0.8}});
  CHECK(evaluate_cost(m, Eigen::Vector2d(5.0, -7.0), 0) == 0.0);
  CHECK(evaluate_cost(m, Eigen::Vector2d(3.0, -1.0), 1) == 3.0);
  CHECK(std::abs(evaluate_cost(m, Eigen::Vector2d(0.8, -0.6), 2)) < 1e-15);
  CHECK_THROWS_AS(evaluate_cost(m, Eigen::Vector2d(1.0, 1.0), 3), ArgumentError);
  CHECK_THROWS_AS(evaluate_cost(m, Eigen::Vector2d(1.0, 1.0), -1), ArgumentError);
}

TEST_CASE("decide") {
  const auto zero = model_of({{0.0}, {0.0}});
  CHECK(decide(zero, Eigen::Vector2d(1.0, 0.0), Eigen::VectorXd::Ones(1)) == 0);
  CHECK(decide(zero, Eigen::Vector2d(0.0, 1.0), Eigen::VectorXd::Ones(1)) == 1);
  // exact tie goes to the smallest index
  CHECK(decide(zero, Eigen::Vector2d(0.0, 0.0), Eigen::VectorXd::Ones(1)) == 0);

  const auto three = model_of({{2.0}, {1.5}, {1.7}});
  CHECK(decide(three, Eigen::Vector3d::Zero(), Eigen::VectorXd::Ones(1)) == 1);

  CHECK_THROWS_AS(decide(three, Eigen::Vector2d::Zero(), Eigen::VectorXd::Ones(1)), ArgumentError);
  CHECK_THROWS_AS(decide(three, Eigen::Vector3d::Zero(), Eigen::VectorXd::Ones(2)), ArgumentError);
}

TEST_CASE("decide invariances") {
  Xoshiro256 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto m = random_model(rng, 4, 3);
    Eigen::VectorXd g(4), x(3);
    for (auto* v : {&g, &x})
      for (Index i = 0; i < v->size(); ++i) (*v)[i] = rng.normal();
    const Index k = decide(m, g, x);
    const double c = rng.normal() * 10.0;
    CHECK(decide(m, (g.array() + c).matrix(), x) == k);
    const double s = 0.1 + rng.uniform() * 5.0;
    CHECK(decide(LinearCostModel(m.beta * s), (g * s).eval(), x) == k);
  }
}

TEST_CASE("dual_objective_sample") {
  Xoshiro256 rng(11);
  const auto one = random_model(rng, 1, 3);
  const Eigen::Vector3d x(0.3, -0.2, 0.9);
  CHECK(dual_objective_sample(one, Eigen::VectorXd::Zero(1), x) == doctest::Approx(one.beta.row(0).dot(x)));

  for (int t = 0; t < 100; ++t) {
    const auto m = random_model(rng, 3, 3);
    Eigen::VectorXd g(3), xx(3);
    for (Index i = 0; i < 3; ++i) {
      g[i] = rng.normal();
      xx[i] = rng.normal();
    }
    double brute = INFINITY;
    for (Index j = 0; j < 3; ++j) brute = std::min(brute, m.beta.row(j).dot(xx) - g[j]);
    CHECK(dual_objective_sample(m, g, xx) == brute);
    const Index k = decide(m, g, xx);
    CHECK(dual_objective_sample(m, g, xx) == evaluate_cost(m, xx, k) - g[k]);
    CHECK(dual_objective_sample(m, (g.array() + 2.5).matrix(), xx) == doctest::Approx(brute - 2.5).epsilon(1e-14));
  }
}

TEST_CASE("batched costs match single evaluations") {
  Xoshiro256 rng(3);
  const auto m = random_model(rng, 5, 4);
  Eigen::MatrixXd xs(4, 17);
  for (Index j = 0; j < xs.cols(); ++j)
    for (Index i = 0; i < 4; ++i) xs(i, j) = rng.normal();
  const Eigen::MatrixXd c = m.costs(xs);
  for (Index j = 0; j < xs.cols(); ++j) CHECK((c.col(j) - m.costs(xs.col(j))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rng determinism and derived streams") {
  Xoshiro256 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs |= x != c();
  }
  CHECK(differs);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s : {streams::contexts, streams::noise, streams::exploration, streams::instance,
                          streams::verification, streams::oracle})
    seeds.insert(derive_seed(5, s));
  CHECK(seeds.size() == 6);

  Xoshiro256 r(9);
  const auto st = r.state();
  const double u1 = r.normal();
  r.set_state(st);
  CHECK(r.normal() == u1);

  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.below(7) < 7);
  }
}

TEST_CASE("context samplers") {
  SUBCASE("unit sphere") {
    ContextSampler s({SamplerKind::UnitSphere, 10, {}}, 1);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(10);
    for (int i = 0; i < 10000; ++i) {
      const Eigen::VectorXd x = s.sample();
      REQUIRE(std::abs(x.norm() - 1.0) < 1e-12);
      mean += x / 10000.0;
    }
    CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(10000.0));
  }
  SUBCASE("unit box") {
    ContextSampler s({SamplerKind::UnitBox, 3, {}}, 2);
    for (int i = 0; i < 10000; ++i) {
      const Eigen::VectorXd x = s.sample();
      REQUIRE((x.array() >= 0.0).all());
      REQUIRE((x.array() <= 1.0).all());
    }
  }
  SUBCASE("replay cycles") {
    Eigen::MatrixXd pts(2, 3);
    pts << 1, 2, 3, 4, 5, 6;
    ContextSampler s({SamplerKind::Replay, 2, pts}, 0);
    for (int i = 0; i < 7; ++i) CHECK(s.sample() == pts.col(i % 3));
  }
  SUBCASE("same seed, same stream; batch equals sequential") {
    ContextSampler a({SamplerKind::UnitSphere, 4, {}}, 99), b({SamplerKind::UnitSphere, 4, {}}, 99);
    Eigen::MatrixXd batch(4, 50);
    a.sample_batch(batch);
    for (Index j = 0; j < 50; ++j) CHECK(batch.col(j) == b.sample());
  }
  SUBCASE("state round trip") {
    ContextSampler a({SamplerKind::UnitSphere, 4, {}}, 5);
    a.sample();
    const auto st = a.state();
    const Eigen::VectorXd x = a.sample();
    a.set_state(st);
    CHECK(a.sample() == x);
  }
}

TEST_CASE("noise model") {
  NoiseModel none(NoiseSpec::none(), 1);
  CHECK(none.draw() == 0.0);
  NoiseModel g(NoiseSpec::gaussian(0.5), 3), g2(NoiseSpec::gaussian(0.5), 3), unit(NoiseSpec::gaussian(1.0), 3);
  double mean = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double e = g.draw();
    CHECK(e == g2.draw());
    CHECK(e == doctest::Approx(0.5 * unit.draw()).epsilon(1e-15));
    mean += e / n;
    sq += e * e / n;
  }
  CHECK(std::abs(mean) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(sq == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("assignment probabilities") {
  SUBCASE("symmetric instance") {
    const auto m = model_of({{1.0, 0.5, -0.2}, {-1.0, -0.5, 0.2}});
    ContextSampler s({SamplerKind::UnitSphere, 3, {}}, 17);
    const long n = 200000;
    const Eigen::VectorXd ph = estimate_assignment_probs(m, Eigen::VectorXd::Zero(2), s, n);
    CHECK(ph.sum() == 1.0);
    CHECK(std::abs(ph[0] - 0.5) < 3.0 * std::sqrt(0.25 / n));
  }
  SUBCASE("dominant bonus") {
    Xoshiro256 rng(2);
    const auto m = random_model(rng, 4, 3);
    ContextSampler s({SamplerKind::UnitSphere, 3, {}}, 17);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[1] = 1e6;
    const Eigen::VectorXd ph = estimate_assignment_probs(m, g, s, 1000);
    CHECK(ph[1] == 1.0);
    CHECK((ph.array() >= 0.0).all());
  }
}

TEST_CASE("instance json round trip and validation") {
  TransportInstance inst;
  inst.d = 3;
  inst.K = 2;
  inst.p = Eigen::Vector2d(0.3, 0.7);
  inst.costs = model_of({{0.1, 0.2, 0.3}, {1.0 / 3.0, -2.0, 1e-17}});
  inst.sampler = {SamplerKind::UnitBox, 3, {}};
  inst.noise = NoiseSpec::gaussian(0.2);
  inst.seed = 12345678901234ULL;
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.costs.beta == inst.costs.beta);
  CHECK(back.p == inst.p);
  CHECK(back.sampler.kind == SamplerKind::UnitBox);
  CHECK(back.noise.sigma == 0.2);
  CHECK(back.seed == inst.seed);

  CHECK_THROWS_AS(instance_from_json("{not json"), InputError);
  CHECK_THROWS_AS(instance_from_json(R"({"version":"semiot-instance-v1","d":1,"K":1,"p":[1],"beta":[[1]],)"
                                     R"("sampler":{"kind":"unit-box"},"noise":{"kind":"none"},"seed":0})"),
                  InputError);

  auto bad = inst;
  bad.p = Eigen::Vector2d(0.3, 0.6);
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad.p = Eigen::Vector2d(0.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = inst;
  bad.costs.beta(0, 0) = NAN;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}
