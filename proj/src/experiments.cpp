#include "semiot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "semiot/io.hpp"
#include "semiot/sa.hpp"

namespace semiot {

using nlohmann::json;

void parallel_for(long count, int jobs, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  const int workers = static_cast<int>(std::min<long>(std::max(jobs, 1), count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  // Lowest failing index wins so the reported error is deterministic.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SyntheticSpec SyntheticSpec::desk() { return SyntheticSpec{}; }

SyntheticSpec SyntheticSpec::paper() {
  SyntheticSpec s;
  s.n_instances = 1000;
  s.oracle_iterations = 10'000'000;
  s.oracle_tolerance = 0.01;
  s.oracle_check_samples = 1'000'000;
  return s;
}

void SyntheticSpec::validate() const {
  if (d < 1 || K < 2) throw ArgumentError("spec: need d >= 1 and K >= 2");
  if (n_instances < 1 || runs_per_instance < 1 || horizon < 1)
    throw ArgumentError("spec: instance, run and horizon counts must be positive");
  if (noise_sigmas.empty()) throw ArgumentError("spec: at least one noise level is required");
  for (double s : noise_sigmas)
    if (!(s >= 0.0)) throw ArgumentError("spec: noise levels must be non-negative");
  if (!(sa_alpha > 0.0)) throw ArgumentError("spec: sa_alpha must be positive");
  explore.validate();
  ridge.validate();
  if (!(p_uniform_mix >= 0.0 && p_uniform_mix < 1.0)) throw ArgumentError("spec: p_uniform_mix must lie in [0, 1)");
  if (oracle_iterations < 1 || oracle_check_samples < 1 || !(oracle_tolerance > 0.0))
    throw ArgumentError("spec: oracle settings must be positive");
  if (pcs_window < 1 || pcs_window > horizon) throw ArgumentError("spec: pcs_window must lie in [1, horizon]");
}

std::string spec_to_json(const SyntheticSpec& s) {
  json doc;
  doc["version"] = kConfigSchema;
  doc["d"] = s.d;
  doc["K"] = s.K;
  doc["n_instances"] = s.n_instances;
  doc["runs_per_instance"] = s.runs_per_instance;
  doc["horizon"] = s.horizon;
  doc["noise_sigmas"] = s.noise_sigmas;
  doc["sa_alpha"] = s.sa_alpha;
  doc["explore"] = {{"mode", s.explore.mode == ExplorationSchedule::Mode::Deterministic ? "det" : "prob"},
                    {"a", s.explore.a}};
  if (s.ridge.mode == RidgePolicy::Mode::Constant)
    doc["rho"] = s.ridge.rho;
  else
    doc["rho"] = "paper-schedule";
  doc["master_seed"] = s.master_seed;
  doc["p_uniform_mix"] = s.p_uniform_mix;
  doc["oracle_iterations"] = s.oracle_iterations;
  doc["oracle_tolerance"] = s.oracle_tolerance;
  doc["oracle_check_samples"] = s.oracle_check_samples;
  doc["pcs_window"] = s.pcs_window;
  return doc.dump(2);
}

SyntheticSpec spec_from_json(std::string_view text, const SyntheticSpec& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("spec: malformed JSON: ") + e.what());
  }
  try {
    if (doc.contains("version") && doc["version"] != kConfigSchema)
      throw InputError("spec: expected version \"" + std::string(kConfigSchema) + "\"");
    SyntheticSpec s = base;
    auto take = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
    };
    take("d", s.d);
    take("K", s.K);
    take("n_instances", s.n_instances);
    take("runs_per_instance", s.runs_per_instance);
    take("horizon", s.horizon);
    take("noise_sigmas", s.noise_sigmas);
    take("sa_alpha", s.sa_alpha);
    if (doc.contains("explore")) {
      const auto& e = doc["explore"];
      if (e.contains("mode"))
        s.explore.mode = e["mode"] == "det" ? ExplorationSchedule::Mode::Deterministic
                                            : ExplorationSchedule::Mode::Probabilistic;
      if (e.contains("a")) s.explore.a = e["a"].get<double>();
    }
    if (doc.contains("rho")) {
      if (doc["rho"].is_string()) {
        if (doc["rho"] != "paper-schedule") throw InputError("spec: rho must be a number or \"paper-schedule\"");
        s.ridge = RidgePolicy::paper_schedule();
      } else {
        s.ridge = RidgePolicy::constant(doc["rho"].get<double>());
      }
    }
    take("master_seed", s.master_seed);
    take("p_uniform_mix", s.p_uniform_mix);
    take("oracle_iterations", s.oracle_iterations);
    take("oracle_tolerance", s.oracle_tolerance);
    take("oracle_check_samples", s.oracle_check_samples);
    take("pcs_window", s.pcs_window);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("spec: ") + e.what());
  } catch (const ArgumentError& e) {
    throw InputError(e.what());
  }
}

namespace {

TransportInstance sphere_instance(Index d, Index K, double mix, double sigma, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  TransportInstance inst;
  inst.d = d;
  inst.K = K;
  Eigen::MatrixXd beta(K, d);
  Eigen::VectorXd row(d);
  for (Index k = 0; k < K; ++k) {
    sample_unit_sphere(rng, row);
    beta.row(k) = row.transpose();
  }
  inst.costs = LinearCostModel(std::move(beta));
  Eigen::VectorXd p = (mix / static_cast<double>(K) + (1.0 - mix) * sample_simplex(rng, K).array()).matrix();
  inst.p = p / p.sum();
  inst.sampler = {SamplerKind::UnitSphere, d, {}};
  inst.noise = NoiseSpec::gaussian(sigma);
  inst.seed = seed;
  inst.validate();
  return inst;
}

}  // namespace

TransportInstance generate_instance(const SyntheticSpec& spec, long index) {
  if (index < 0 || index >= spec.n_instances) throw ArgumentError("generate_instance: index out of range");
  const std::uint64_t seed =
      derive_seed(derive_seed(spec.master_seed, streams::instance), static_cast<std::uint64_t>(index));
  return sphere_instance(spec.d, spec.K, spec.p_uniform_mix, spec.noise_sigmas.front(), seed);
}

OracleOptions oracle_options(const SyntheticSpec& spec, const TransportInstance& instance) {
  OracleOptions o;
  o.iterations = spec.oracle_iterations;
  o.tolerance = spec.oracle_tolerance;
  o.check_samples = spec.oracle_check_samples;
  o.alpha = spec.sa_alpha;
  o.seed = instance.seed;
  return o;
}

RunTrace run_benchmark_policy(const TransportInstance& instance, long horizon, double alpha, std::uint64_t seed,
                              const std::optional<Truth>& truth, long snapshot_every) {
  instance.validate();
  if (horizon < 1) throw ArgumentError("run_benchmark_policy: horizon must be >= 1");
  if (!(alpha > 0.0)) throw ArgumentError("run_benchmark_policy: alpha must be positive");
  RunTrace trace;
  trace.sampler = instance.sampler;
  trace.context_seed = derive_seed(seed, streams::contexts);
  ContextSampler contexts(instance.sampler, trace.context_seed);
  trace.rows.reserve(static_cast<std::size_t>(horizon));
  DualWeights g = DualWeights::Zero(instance.K);
  Eigen::VectorXd x(instance.d);
  for (long n = 0; n < horizon; ++n) {
    contexts.sample(x);
    const Index k = decide(instance.costs, g, x);
    sa_update(g, instance.p, k, sa_stepsize(alpha, n));
    TraceRow row;
    row.n = n + 1;
    row.x_hash = context_hash(x);
    row.pi = row.pi_hat = k;
    const bool snap = snapshot_every == 0 ? default_trace_point(row.n)
                      : snapshot_every > 0 ? row.n % snapshot_every == 0
                                           : false;
    if (truth) {
      row.correct = decide(truth->model, truth->g_star, x) == k ? 1 : 0;
      if (snap || row.n == horizon) row.delta_norm = delta_norm(g, truth->g_star);
    }
    if (snap) trace.snapshots.push_back({row.n, g, {}});
    trace.rows.push_back(row);
  }
  return trace;
}

const TerminalPcs& BenchResult::terminal_for(std::string_view policy, double sigma) const {
  for (const auto& t : terminal)
    if (t.policy == policy && t.sigma == sigma) return t;
  throw ArgumentError("no terminal PCS for policy " + std::string(policy));
}

namespace {

std::vector<long> log_points(long lo, long hi, int per_decade) {
  std::vector<long> pts;
  const double step = 1.0 / per_decade;
  for (double e = std::log10(static_cast<double>(lo)); e <= std::log10(static_cast<double>(hi)) + 1e-9; e += step) {
    const long v = std::lround(std::pow(10.0, e));
    if (pts.empty() || v > pts.back()) pts.push_back(v);
  }
  return pts;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  const double n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

}  // namespace

BenchResult pcs_trajectory(const SyntheticSpec& spec, int jobs, const std::vector<OracleResult>* oracles) {
  spec.validate();
  BenchResult out;
  const auto I = static_cast<std::size_t>(spec.n_instances);
  out.instances.reserve(I);
  for (long i = 0; i < spec.n_instances; ++i) out.instances.push_back(generate_instance(spec, i));

  if (oracles) {
    if (oracles->size() != I) throw ArgumentError("pcs_trajectory: need one cached oracle per instance");
    out.oracles = *oracles;
  } else {
    out.oracles.resize(I);
    try {
      parallel_for(spec.n_instances, jobs, [&](long i) {
        try {
          const auto& inst = out.instances[static_cast<std::size_t>(i)];
          out.oracles[static_cast<std::size_t>(i)] = solve_gstar_long_sa(inst, oracle_options(spec, inst));
        } catch (const OracleFailure& e) {
          throw OracleFailure("instance " + std::to_string(i) + ": " + e.what());
        }
      });
    } catch (const OracleFailure&) {
      throw;
    }
  }

  const std::size_t S = spec.noise_sigmas.size();
  const auto H = static_cast<std::size_t>(spec.horizon);
  const auto rate_pts = log_points(10, spec.horizon, 10);
  const std::size_t P = rate_pts.size();
  const double R = static_cast<double>(spec.runs_per_instance);

  // Per instance: run-averaged correct flags (benchmark, then one per sigma)
  // and run-averaged squared errors at rate_pts.
  struct PerInstance {
    std::vector<std::vector<double>> correct;  // [1 + S][H]
    std::vector<double> bench_delta2;           // [P]
    std::vector<std::vector<double>> delta2;    // [S][P]
    std::vector<std::vector<double>> Delta2;    // [S][P]
  };
  std::vector<PerInstance> per(I);

  parallel_for(spec.n_instances, jobs, [&](long i) {
    auto& slot = per[static_cast<std::size_t>(i)];
    slot.correct.assign(1 + S, std::vector<double>(H, 0.0));
    slot.bench_delta2.assign(P, 0.0);
    slot.delta2.assign(S, std::vector<double>(P, 0.0));
    slot.Delta2.assign(S, std::vector<double>(P, 0.0));
    TransportInstance inst = out.instances[static_cast<std::size_t>(i)];
    const Truth truth{inst.costs, out.oracles[static_cast<std::size_t>(i)].g_star};
    for (long r = 0; r < spec.runs_per_instance; ++r) {
      const std::uint64_t run_seed = inst.seed + static_cast<std::uint64_t>(r);
      const RunTrace bench = run_benchmark_policy(inst, spec.horizon, spec.sa_alpha, run_seed, truth, -1);
      // Re-run the recursion to read delta at rate points without storing snapshots.
      {
        ContextSampler contexts(inst.sampler, derive_seed(run_seed, streams::contexts));
        DualWeights g = DualWeights::Zero(inst.K);
        Eigen::VectorXd x(inst.d);
        std::size_t next = 0;
        for (long n = 0; n < spec.horizon; ++n) {
          contexts.sample(x);
          sa_update(g, inst.p, decide(inst.costs, g, x), sa_stepsize(spec.sa_alpha, n));
          if (next < P && n + 1 == rate_pts[next]) {
            slot.bench_delta2[next] += std::pow(delta_norm(g, truth.g_star), 2) / R;
            ++next;
          }
        }
      }
      for (std::size_t t = 0; t < H; ++t) slot.correct[0][t] += bench.rows[t].correct / R;
      for (std::size_t s = 0; s < S; ++s) {
        inst.noise = NoiseSpec::gaussian(spec.noise_sigmas[s]);
        LearnerConfig cfg;
        cfg.alpha = spec.sa_alpha;
        cfg.schedule = spec.explore;
        cfg.ridge = spec.ridge;
        cfg.seed = run_seed;
        RunOptions ro;
        ro.snapshot_every = -1;
        std::size_t next = 0;
        ro.hooks.push_back([&](const StepRecord& rec, const LearnerState& st) {
          if (next < P && rec.n == rate_pts[next]) {
            slot.delta2[s][next] += std::pow(delta_norm(st.g, truth.g_star), 2) / R;
            slot.Delta2[s][next] += std::pow(max_coefficient_error(st.beta_hat, truth.model), 2) / R;
            ++next;
          }
        });
        const RunTrace tr = run_learner(inst, cfg, spec.horizon, truth, ro);
        for (std::size_t t = 0; t < H; ++t) slot.correct[1 + s][t] += tr.rows[t].correct / R;
      }
    }
  });

  auto policy_of = [&](std::size_t c) { return c == 0 ? std::string("benchmark") : std::string("semi-myopic"); };
  // Deterministic reduction in instance order.
  std::vector<double> column(I);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t c : {std::size_t{0}, 1 + s}) {
      for (std::size_t t = 0; t < H; ++t) {
        for (std::size_t i = 0; i < I; ++i) column[i] = per[i].correct[c][t];
        const MeanSe m = mean_se(column);
        out.pcs.push_back({static_cast<long>(t + 1), policy_of(c), spec.noise_sigmas[s], m.mean, m.se});
      }
      for (std::size_t i = 0; i < I; ++i) {
        double acc = 0.0;
        for (std::size_t t = H - static_cast<std::size_t>(spec.pcs_window); t < H; ++t) acc += per[i].correct[c][t];
        column[i] = acc / static_cast<double>(spec.pcs_window);
      }
      const MeanSe m = mean_se(column);
      out.terminal.push_back({policy_of(c), spec.noise_sigmas[s], m.mean, m.se});
    }
  }

  std::vector<double> xs(rate_pts.begin(), rate_pts.end());
  const double lo = std::max(10.0, static_cast<double>(spec.horizon) / 10.0);
  auto add_rate = [&](const std::string& q, const std::string& policy, double sigma, const std::vector<double>& ys) {
    std::size_t npts = 0;
    for (double x : xs) npts += x >= lo;
    if (npts < 10) return;
    bool positive = true;
    for (std::size_t j = 0; j < ys.size(); ++j) positive &= !(xs[j] >= lo) || ys[j] > 0.0;
    if (!positive) return;
    out.rates.push_back({q, policy, sigma, static_cast<long>(lo), spec.horizon, fit_rate(xs, ys, lo)});
  };
  std::vector<double> mean(P);
  for (std::size_t j = 0; j < P; ++j) {
    mean[j] = 0.0;
    for (std::size_t i = 0; i < I; ++i) mean[j] += per[i].bench_delta2[j] / static_cast<double>(I);
  }
  add_rate("delta2", "benchmark", 0.0, mean);
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> d2(P, 0.0), D2(P, 0.0);
    for (std::size_t j = 0; j < P; ++j)
      for (std::size_t i = 0; i < I; ++i) {
        d2[j] += per[i].delta2[s][j] / static_cast<double>(I);
        D2[j] += per[i].Delta2[s][j] / static_cast<double>(I);
      }
    add_rate("delta2", "semi-myopic", spec.noise_sigmas[s], d2);
    add_rate("Delta2_max", "semi-myopic", spec.noise_sigmas[s], D2);
  }
  return out;
}

RateFit fit_rate(std::span<const double> n, std::span<const double> values, double n_lo, double n_hi) {
  if (n.size() != values.size()) throw ArgumentError("fit_rate: series lengths differ");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < n_lo || n[i] > n_hi) continue;
    if (!(n[i] > 0.0) || !(values[i] > 0.0)) throw ArgumentError("fit_rate: values must be positive");
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 10) throw ArgumentError("fit_rate: need at least 10 points in the window");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    sse += e * e;
  }
  f.stderr_ = std::sqrt(sse / (m - 2.0) / sxx);
  f.points = static_cast<long>(lx.size());
  return f;
}

RateStudyResult rate_study(const RateStudySpec& spec, int jobs) {
  if (spec.horizon < spec.n_lo || spec.n_lo < 1) throw ArgumentError("rate_study: need 1 <= n_lo <= horizon");
  const auto pts = log_points(spec.n_lo, spec.horizon, spec.points_per_decade);
  const std::size_t P = pts.size();
  const double bin_ratio = std::pow(10.0, -1.0 / spec.points_per_decade);
  const auto I = static_cast<std::size_t>(spec.n_instances);
  const double total_runs = static_cast<double>(spec.n_instances * spec.runs_per_instance);

  struct Sums {
    std::vector<double> sa, ld, lD, pics, cum_hat, cum_pi;
  };
  std::vector<Sums> per(I);

  parallel_for(spec.n_instances, jobs, [&](long i) {
    auto& s = per[static_cast<std::size_t>(i)];
    s.sa.assign(P, 0.0);
    s.ld.assign(P, 0.0);
    s.lD.assign(P, 0.0);
    s.pics.assign(P, 0.0);
    s.cum_hat.assign(P, 0.0);
    s.cum_pi.assign(P, 0.0);
    const std::uint64_t seed =
        derive_seed(derive_seed(spec.master_seed, streams::instance), static_cast<std::uint64_t>(i));
    const TransportInstance inst = sphere_instance(spec.d, spec.K, spec.p_uniform_mix, spec.sigma, seed);
    OracleOptions oo;
    oo.iterations = spec.oracle_iterations;
    oo.tolerance = spec.oracle_tolerance;
    oo.alpha = spec.sa_alpha;
    oo.seed = seed;
    const OracleResult oracle = solve_gstar_long_sa(inst, oo);
    const Truth truth{inst.costs, oracle.g_star};
    for (long r = 0; r < spec.runs_per_instance; ++r) {
      const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
      {
        ContextSampler contexts(inst.sampler, derive_seed(run_seed, streams::contexts));
        DualWeights g = DualWeights::Zero(inst.K);
        Eigen::VectorXd x(inst.d);
        std::size_t next = 0;
        for (long n = 0; n < spec.horizon && next < P; ++n) {
          contexts.sample(x);
          sa_update(g, inst.p, decide(inst.costs, g, x), sa_stepsize(spec.sa_alpha, n));
          if (n + 1 == pts[next]) s.sa[next++] += std::pow(delta_norm(g, truth.g_star), 2);
        }
      }
      LearnerConfig cfg;
      cfg.alpha = spec.sa_alpha;
      cfg.schedule = spec.explore;
      cfg.ridge = spec.ridge;
      cfg.seed = run_seed;
      LearnerState state = make_learner(inst, cfg);
      const LinearObservation obs{inst};
      long wrong_hat = 0, wrong_pi = 0;
      std::vector<long> cum_hat(static_cast<std::size_t>(spec.horizon) + 1, 0);
      std::size_t next = 0;
      for (long n = 1; n <= spec.horizon; ++n) {
        const StepRecord rec = learner_step(state, obs);
        const Index best = decide(truth.model, truth.g_star, rec.features);
        wrong_hat += rec.pi_hat != best;
        wrong_pi += rec.pi != best;
        cum_hat[static_cast<std::size_t>(n)] = wrong_hat;
        if (next < P && n == pts[next]) {
          // Plug-in error rate over the geometric bin (n * bin_ratio, n].
          const auto start = static_cast<long>(std::floor(static_cast<double>(n) * bin_ratio));
          s.pics[next] += static_cast<double>(wrong_hat - cum_hat[static_cast<std::size_t>(start)]) /
                          static_cast<double>(n - start);
          s.ld[next] += std::pow(delta_norm(state.g, truth.g_star), 2);
          s.lD[next] += std::pow(max_coefficient_error(state.beta_hat, truth.model), 2);
          s.cum_hat[next] += static_cast<double>(wrong_hat);
          s.cum_pi[next] += static_cast<double>(wrong_pi);
          ++next;
        }
      }
    }
  });

  RateStudyResult out;
  out.n.assign(pts.begin(), pts.end());
  auto reduce = [&](std::vector<double> Sums::*field) {
    std::vector<double> v(P, 0.0);
    for (std::size_t j = 0; j < P; ++j)
      for (const auto& s : per) v[j] += (s.*field)[j] / total_runs;
    return v;
  };
  out.sa_delta2 = reduce(&Sums::sa);
  out.learner_delta2 = reduce(&Sums::ld);
  out.learner_Delta2 = reduce(&Sums::lD);
  out.pics_plugin = reduce(&Sums::pics);
  out.cum_incorrect_plugin = reduce(&Sums::cum_hat);
  out.cum_incorrect_policy = reduce(&Sums::cum_pi);
  out.sa_delta2_fit = fit_rate(out.n, out.sa_delta2);
  out.learner_delta2_fit = fit_rate(out.n, out.learner_delta2);
  out.learner_Delta2_fit = fit_rate(out.n, out.learner_Delta2);
  out.pics_fit = fit_rate(out.n, out.pics_plugin);
  out.cum_plugin_fit = fit_rate(out.n, out.cum_incorrect_plugin);
  out.cum_policy_fit = fit_rate(out.n, out.cum_incorrect_policy);
  return out;
}

std::vector<RateRow> rate_rows(const RateStudyResult& r, const RateStudySpec& spec) {
  const long lo = static_cast<long>(r.n.front()), hi = static_cast<long>(r.n.back());
  return {
      {"delta2", "known-cost-sa", spec.sigma, lo, hi, r.sa_delta2_fit},
      {"delta2", "semi-myopic", spec.sigma, lo, hi, r.learner_delta2_fit},
      {"Delta2_max", "semi-myopic", spec.sigma, lo, hi, r.learner_Delta2_fit},
      {"pics_plugin", "semi-myopic", spec.sigma, lo, hi, r.pics_fit},
      {"cum_incorrect_plugin", "semi-myopic", spec.sigma, lo, hi, r.cum_plugin_fit},
      {"cum_incorrect_policy", "semi-myopic", spec.sigma, lo, hi, r.cum_policy_fit},
  };
}

void write_pcs_csv(std::ostream& out, const std::vector<PcsRow>& rows) {
  out << "n,policy,sigma,pcs,se\r\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.policy << ',' << format_double(r.sigma) << ',' << format_double(r.pcs) << ','
        << format_double(r.se) << "\r\n";
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "quantity,policy,sigma,n_lo,n_hi,slope,stderr,points\r\n";
  for (const auto& r : rows)
    out << r.quantity << ',' << r.policy << ',' << format_double(r.sigma) << ',' << r.n_lo << ',' << r.n_hi << ','
        << format_double(r.fit.slope) << ',' << format_double(r.fit.stderr_) << ',' << r.fit.points << "\r\n";
}

}  // namespace semiot
