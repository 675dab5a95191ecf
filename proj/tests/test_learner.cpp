#include <doctest.h>

#include <cmath>

#include "semiot/errors.hpp"
#include "semiot/experiments.hpp"
#include "semiot/learner.hpp"

using namespace semiot;

namespace {

TransportInstance small_instance(std::uint64_t seed, Index K = 3, Index d = 4, double sigma = 0.1) {
  SyntheticSpec spec;
  spec.K = K;
  spec.d = d;
  spec.noise_sigmas = {sigma};
  spec.master_seed = seed;
  return generate_instance(spec, 0);
}

bool same_record(const StepRecord& a, const StepRecord& b) {
  return a.n == b.n && a.x == b.x && a.pi == b.pi && a.pi_hat == b.pi_hat && a.explored == b.explored && a.w == b.w;
}

}  // namespace

TEST_CASE("hand-traced step: forced alternative differs from the plug-in") {
  TransportInstance inst;
  inst.d = 1;
  inst.K = 2;
  inst.p = Eigen::Vector2d(0.25, 0.75);
  inst.costs = LinearCostModel(Eigen::Matrix<double, 2, 1>(1.0, 3.0));
  inst.sampler = {SamplerKind::Replay, 1, Eigen::MatrixXd::Constant(1, 1, 1.0)};
  inst.noise = NoiseSpec::none();
  LearnerConfig cfg;
  cfg.schedule = ExplorationSchedule::deterministic(5.0);
  cfg.alpha = 50.0;
  LearnerState st = make_learner(inst, cfg);
  st.n = 222;  // forced time for the first alternative
  st.g = Eigen::Vector2d(0.0, 3.0);  // adjusted costs (1, 0): plug-in is the second alternative

  const StepRecord rec = learner_step(st, inst);
  CHECK(rec.explored);
  CHECK(rec.pi == 0);
  CHECK(rec.pi_hat == 1);
  const double a = 50.0 / 223.0;
  CHECK(st.g[0] == doctest::Approx(0.0 + a * 0.25));
  CHECK(st.g[1] == doctest::Approx(3.0 + a * (0.75 - 1.0)));
  CHECK(st.accs[0].count == 1);
  CHECK(st.accs[1].count == 0);
  CHECK(rec.w == 1.0);
  // one observation x = 1, w = 1, rho = 0.001
  CHECK(st.beta_hat.beta(0, 0) == doctest::Approx(1.0 / 1.001));
  CHECK(st.beta_hat.beta(1, 0) == 0.0);
  CHECK(st.n == 223);
  CHECK(rec.n == 223);
}

TEST_CASE("one accumulator per step, plug-in drives g, sum of g conserved") {
  const auto inst = small_instance(3);
  LearnerConfig cfg;
  cfg.schedule = ExplorationSchedule::probabilistic(2.0);  // explores often
  cfg.seed = 9;
  LearnerState st = make_learner(inst, cfg);
  const double g_sum = st.g.sum();
  long explored_apart = 0;
  for (int i = 0; i < 5000; ++i) {
    std::vector<long> before;
    for (const auto& a : st.accs) before.push_back(a.count);
    const DualWeights g_before = st.g;
    const StepRecord rec = learner_step(st, inst);
    long changed = 0;
    for (std::size_t k = 0; k < before.size(); ++k) changed += st.accs[k].count - before[k];
    REQUIRE(changed == 1);
    REQUIRE(st.accs[static_cast<std::size_t>(rec.pi)].count == before[static_cast<std::size_t>(rec.pi)] + 1);
    const double step = cfg.alpha / static_cast<double>(rec.n);
    for (Index k = 0; k < inst.K; ++k)
      REQUIRE(std::abs(st.g[k] - (g_before[k] + step * (inst.p[k] - (k == rec.pi_hat ? 1.0 : 0.0)))) <= 1e-12);
    explored_apart += rec.explored && rec.pi != rec.pi_hat;
  }
  CHECK(explored_apart > 10);
  CHECK(std::abs(st.g.sum() - g_sum) <= 1e-9);
}

TEST_CASE("conservation over 1e6 learner steps") {
  const auto inst = small_instance(4, 3, 3);
  LearnerConfig cfg;
  cfg.seed = 1;
  LearnerState st = make_learner(inst, cfg);
  for (long i = 0; i < 1'000'000; ++i) learner_step(st, inst);
  CHECK(std::abs(st.g.sum()) <= 1e-9);
}

TEST_CASE("truth plug-in reproduces the known-cost benchmark") {
  auto inst = small_instance(5, 4, 5);
  inst.noise = NoiseSpec::none();
  LearnerConfig cfg;
  cfg.seed = 77;
  LearnerState st = make_learner(inst, cfg);
  st.beta_hat = inst.costs;
  for (Index k = 0; k < inst.K; ++k) st.rls[static_cast<std::size_t>(k)].beta = inst.costs.beta.row(k).transpose();
  const RunTrace bench = run_benchmark_policy(inst, 2000, cfg.alpha, cfg.seed);
  for (std::size_t i = 0; i < bench.rows.size(); ++i) {
    const StepRecord rec = learner_step(st, inst);
    REQUIRE(rec.pi_hat == bench.rows[i].pi);
  }
  CHECK((st.beta_hat.beta - inst.costs.beta).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("paper-schedule estimates are re-derivable from the accumulators") {
  const auto inst = small_instance(6);
  LearnerConfig cfg;
  cfg.ridge = RidgePolicy::paper_schedule();
  LearnerState st = make_learner(inst, cfg);
  CHECK(st.rls.empty());
  std::vector<long> last(static_cast<std::size_t>(inst.K), 0);
  for (int i = 0; i < 3000; ++i) {
    const StepRecord rec = learner_step(st, inst);
    last[static_cast<std::size_t>(rec.pi)] = rec.n;
  }
  for (Index k = 0; k < inst.K; ++k) {
    const Eigen::VectorXd b =
        solve_beta(st.accs[static_cast<std::size_t>(k)], cfg.ridge.rho_at(last[static_cast<std::size_t>(k)]));
    CHECK((st.beta_hat.beta.row(k).transpose() - b).norm() <= 1e-8);
  }
}

TEST_CASE("constant-rho estimates are re-derivable from the accumulators") {
  const auto inst = small_instance(7);
  LearnerConfig cfg;
  LearnerState st = make_learner(inst, cfg);
  for (int i = 0; i < 3000; ++i) learner_step(st, inst);
  for (Index k = 0; k < inst.K; ++k) {
    const Eigen::VectorXd b = solve_beta(st.accs[static_cast<std::size_t>(k)], 0.001);
    CHECK((st.beta_hat.beta.row(k).transpose() - b).norm() <= 1e-8 * (1.0 + b.norm()));
  }
}

TEST_CASE("run_learner determinism and record count") {
  const auto inst = small_instance(8);
  LearnerConfig cfg;
  cfg.seed = 3;
  const RunTrace one = run_learner(inst, cfg, 1);
  CHECK(one.rows.size() == 1);
  const RunTrace a = run_learner(inst, cfg, 3000), b = run_learner(inst, cfg, 3000);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].x_hash == b.rows[i].x_hash);
    REQUIRE(a.rows[i].pi == b.rows[i].pi);
    REQUIRE(a.rows[i].w == b.rows[i].w);
  }
  CHECK_THROWS_AS(run_learner(inst, cfg, 0), ArgumentError);
}

TEST_CASE("noise level does not change contexts") {
  auto lo = small_instance(9);
  auto hi = lo;
  hi.noise = NoiseSpec::gaussian(0.5);
  LearnerConfig cfg;
  cfg.seed = 4;
  const RunTrace a = run_learner(lo, cfg, 500), b = run_learner(hi, cfg, 500);
  for (std::size_t i = 0; i < a.rows.size(); ++i) REQUIRE(a.rows[i].x_hash == b.rows[i].x_hash);
}

TEST_CASE("checkpoint round trip") {
  for (const auto& ridge : {RidgePolicy::constant(0.001), RidgePolicy::paper_schedule()}) {
    const auto inst = small_instance(10);
    LearnerConfig cfg;
    cfg.seed = 12;
    cfg.ridge = ridge;
    cfg.schedule = ExplorationSchedule::probabilistic(3.0);
    LearnerState st = make_learner(inst, cfg);
    for (int i = 0; i < 250; ++i) learner_step(st, inst);
    const std::string blob = checkpoint(st);
    LearnerState resumed = restore(blob, inst, cfg);
    for (int i = 0; i < 100; ++i) REQUIRE(same_record(learner_step(st, inst), learner_step(resumed, inst)));
    CHECK(st.g == resumed.g);
    CHECK(st.beta_hat.beta == resumed.beta_hat.beta);

    CHECK_THROWS_AS(restore(blob.substr(0, blob.size() / 2), inst, cfg), CorruptCheckpoint);
    LearnerConfig other = cfg;
    other.ridge = ridge.mode == RidgePolicy::Mode::Constant ? RidgePolicy::paper_schedule()
                                                            : RidgePolicy::constant(0.001);
    CHECK_THROWS_AS(restore(blob, inst, other), CheckpointVersionError);
    std::string wrong = blob;
    wrong.replace(wrong.find("semiot-checkpoint-v1"), 20, "semiot-checkpoint-v9");
    CHECK_THROWS_AS(restore(wrong, inst, cfg), CheckpointVersionError);
  }
}
