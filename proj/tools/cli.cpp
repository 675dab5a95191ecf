#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "semiot/errors.hpp"
#include "semiot/experiments.hpp"
#include "semiot/io.hpp"
#include "semiot/learner.hpp"
#include "semiot/oracle.hpp"
#include "semiot/sa.hpp"
#include "semiot/voronoi.hpp"

namespace semiot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_stream(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ostringstream s;
  fn(s);
  write_text_file(path, s.str());
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(what + ": malformed JSON: " + e.what());
  }
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  json doc = parse_json(read_text_file(path), path);
  if (!doc.is_object()) throw InputError(path + ": config must be a JSON object");
  if (doc.contains("version") && doc["version"] != kConfigSchema)
    throw InputError(path + ": expected version \"" + std::string(kConfigSchema) + "\"");
  return doc;
}

template <typename T>
T cfg_get(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key \"") + key + "\": " + e.what());
  }
}

ExplorationSchedule schedule_of(const json& cfg) {
  const auto mode = cfg_get<std::string>(cfg, "explore_mode");
  const double a = cfg_get<double>(cfg, "explore_a");
  if (mode == "det") return ExplorationSchedule::deterministic(a);
  if (mode == "prob") return ExplorationSchedule::probabilistic(a);
  throw InputError("explore_mode must be \"det\" or \"prob\"");
}

RidgePolicy ridge_of(const json& cfg) {
  if (cfg.at("rho").is_string()) {
    if (cfg["rho"] != "paper-schedule") throw InputError("rho must be a number or \"paper-schedule\"");
    return RidgePolicy::paper_schedule();
  }
  return RidgePolicy::constant(cfg_get<double>(cfg, "rho"));
}

LearnerConfig learner_config_of(const json& cfg) {
  LearnerConfig lc;
  lc.alpha = cfg_get<double>(cfg, "alpha");
  lc.schedule = schedule_of(cfg);
  lc.ridge = ridge_of(cfg);
  lc.seed = cfg_get<std::uint64_t>(cfg, "seed");
  lc.validate();
  return lc;
}

/// Flags shared by the learner-driven commands.
struct LearnerFlags {
  double alpha = 50.0;
  std::string explore_mode = "prob";
  double explore_a = 4.5;
  double rho = 0.001;
  bool rho_schedule = false;
  std::uint64_t seed = 0;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_a = nullptr;
  CLI::Option* o_rho = nullptr;
  CLI::Option* o_sched = nullptr;
  CLI::Option* o_seed = nullptr;

  void attach(CLI::App* app, bool with_explore) {
    o_alpha = app->add_option("--alpha", alpha, "SA stepsize constant (stepsize alpha/(n+1))")
                  ->check(CLI::PositiveNumber);
    o_seed = app->add_option("--seed", seed, "Base seed");
    if (!with_explore) return;
    o_mode = app->add_option("--explore-mode", explore_mode, "Forced exploration schedule")
                 ->check(CLI::IsMember({"det", "prob"}));
    o_a = app->add_option("--explore-a", explore_a, "Exploration schedule constant a")->check(CLI::PositiveNumber);
    o_rho = app->add_option("--rho", rho, "Constant ridge parameter")->check(CLI::PositiveNumber);
    o_sched = app->add_flag("--rho-schedule", rho_schedule, "Use the growing schedule 1 + (ln n)^3");
    o_rho->excludes(o_sched);
  }

  /// flags > config file > defaults
  void merge(json& cfg) const {
    auto put = [&](CLI::Option* o, const char* key, const json& v) {
      if (o && o->count() > 0) cfg[key] = v;
      else if (!cfg.contains(key)) cfg[key] = v;
    };
    put(o_alpha, "alpha", alpha);
    put(o_seed, "seed", seed);
    if (!o_mode) return;
    put(o_mode, "explore_mode", explore_mode);
    put(o_a, "explore_a", explore_a);
    if (o_sched->count() > 0) cfg["rho"] = "paper-schedule";
    else put(o_rho, "rho", rho);
  }
};

template <typename T>
void put_flag(json& cfg, CLI::Option* o, const char* key, const T& v) {
  if (o->count() > 0 || !cfg.contains(key)) cfg[key] = v;
}

// ---------------------------------------------------------------- commands

void exec_solve(const json& cfg, const fs::path& out, std::ostream& log) {
  const TransportInstance inst = instance_from_json(cfg.at("instance").dump());
  SAConfig sc;
  sc.alpha = cfg_get<double>(cfg, "alpha");
  sc.n_iters = cfg_get<long>(cfg, "iters");
  const auto seed = cfg_get<std::uint64_t>(cfg, "seed");
  const SAResult r = run_sa(inst, sc, cfg_get<long>(cfg, "trace_every"), seed);
  json g;
  g["version"] = "semiot-dual-v1";
  g["iterations"] = sc.n_iters;
  g["g"] = std::vector<double>(r.g.data(), r.g.data() + r.g.size());
  const DualWeights gn = normalized(r.g);
  g["g_normalized"] = std::vector<double>(gn.data(), gn.data() + gn.size());
  const double tol = cfg_get<double>(cfg, "verify_tol");
  if (tol > 0.0) {
    const TargetCheck check = verify_targets(inst.costs, r.g, inst.p, inst.sampler,
                                             derive_seed(seed, streams::verification),
                                             cfg_get<long>(cfg, "verify_samples"), tol);
    g["residual"] = std::vector<double>(check.residual.data(), check.residual.data() + check.residual.size());
    write_text_file(out / "g.json", g.dump(2));
    write_stream(out / "trace.csv", [&](std::ostream& s) { write_sa_trace_csv(s, r.trace); });
    if (!check.pass)
      throw OracleFailure("assignment residual " + format_double(check.residual.maxCoeff()) + " exceeds " +
                          format_double(tol));
    return;
  }
  write_text_file(out / "g.json", g.dump(2));
  write_stream(out / "trace.csv", [&](std::ostream& s) { write_sa_trace_csv(s, r.trace); });
  log << "solve: " << sc.n_iters << " iterations\n";
}

void exec_learn(const json& cfg, const fs::path& out, std::ostream& log) {
  const TransportInstance inst = instance_from_json(cfg.at("instance").dump());
  const LearnerConfig lc = learner_config_of(cfg);
  const long horizon = cfg_get<long>(cfg, "horizon");
  std::optional<Truth> truth;
  if (cfg_get<bool>(cfg, "score")) {
    OracleOptions oo;
    oo.iterations = cfg_get<long>(cfg, "oracle_iters");
    oo.tolerance = cfg_get<double>(cfg, "oracle_tol");
    oo.check_samples = cfg_get<long>(cfg, "oracle_check_samples");
    oo.alpha = lc.alpha;
    oo.seed = lc.seed;
    const OracleResult o = solve_gstar_long_sa(inst, oo);
    write_text_file(out / "oracle.json", oracle_to_json(o));
    truth = Truth{inst.costs, o.g_star};
  }
  LearnerState state = make_learner(inst, lc);
  const RunTrace trace = run_learner_with(state, LinearObservation{inst}, horizon, truth);
  write_stream(out / "trace.csv", [&](std::ostream& s) { write_run_trace_csv(s, trace); });
  write_text_file(out / "checkpoint.json", checkpoint(state));
  if (truth) {
    const ScoreReport rep = score_run(trace, truth, cfg_get<long>(cfg, "window"));
    write_stream(out / "score.csv", [&](std::ostream& s) { write_score_csv(s, rep); });
    log << "learn: terminal windowed PCS " << format_double(rep.pcs_plugin_window.back()) << '\n';
  }
}

void exec_bench(const json& cfg, const fs::path& out, int jobs, std::ostream& log) {
  const SyntheticSpec spec = spec_from_json(cfg.at("spec").dump(), SyntheticSpec::desk());
  log << "bench: " << spec.n_instances << " instances x " << spec.runs_per_instance << " runs x " << spec.horizon
      << " steps, K = " << spec.K << ", jobs = " << jobs << '\n';
  const BenchResult r = pcs_trajectory(spec, jobs);
  fs::create_directories(out / "instances");
  fs::create_directories(out / "oracles");
  char name[32];
  for (std::size_t i = 0; i < r.instances.size(); ++i) {
    std::snprintf(name, sizeof name, "%05zu.json", i);
    write_text_file(out / "instances" / name, instance_to_json(r.instances[i]));
    write_text_file(out / "oracles" / name, oracle_to_json(r.oracles[i]));
  }
  write_stream(out / "pcs.csv", [&](std::ostream& s) { write_pcs_csv(s, r.pcs); });
  std::vector<RateRow> rates = r.rates;
  if (cfg_get<bool>(cfg, "rate_study")) {
    RateStudySpec rs;
    rs.master_seed = spec.master_seed;
    const auto extra = rate_rows(rate_study(rs, jobs), rs);
    rates.insert(rates.end(), extra.begin(), extra.end());
  }
  write_stream(out / "rates.csv", [&](std::ostream& s) { write_rates_csv(s, rates); });
  json meta;
  meta["code_version"] = code_version();
  meta["rng_version"] = Xoshiro256::kVersion;
  meta["profile"] = cfg_get<std::string>(cfg, "profile");
  meta["master_seed"] = spec.master_seed;
  meta["assumptions"] = {{"K", spec.K}, {"K_note", "number of alternatives is not fixed by the source; configurable"}};
  json term = json::array();
  for (const auto& t : r.terminal)
    term.push_back({{"policy", t.policy}, {"sigma", t.sigma}, {"pcs", t.pcs}, {"se", t.se}});
  meta["terminal_pcs"] = term;
  write_text_file(out / "metadata.json", meta.dump(2));
  for (const auto& t : r.terminal)
    log << "  " << t.policy << " sigma=" << format_double(t.sigma) << " terminal PCS " << format_double(t.pcs)
        << '\n';
}

void exec_voronoi(const json& cfg, const fs::path& out, std::ostream& log) {
  const FacilityInstance f = facility_from_json(cfg.at("facility").dump());
  PartitionConfig pc;
  pc.learner = learner_config_of(cfg);
  pc.checkpoints = cfg_get<std::vector<long>>(cfg, "checkpoints");
  pc.resolution = cfg_get<int>(cfg, "resolution");
  pc.oracle.iterations = cfg_get<long>(cfg, "oracle_iters");
  pc.oracle.tolerance = cfg_get<double>(cfg, "oracle_tol");
  pc.oracle.check_samples = cfg_get<long>(cfg, "oracle_check_samples");
  pc.oracle.alpha = pc.learner.alpha;
  pc.oracle.seed = f.seed;
  const long horizon = cfg_get<long>(cfg, "horizon");
  if (pc.resolution < 16) throw ArgumentError("--resolution must be >= 16");
  const PartitionResult r = run_partition_learning(f, horizon, pc);
  const Index K = f.alternatives();
  write_partition_pgm(out / "true.pgm", r.true_partition, K);
  write_stream(out / "true.csv", [&](std::ostream& s) { write_partition_csv(s, r.true_partition); });
  const DistanceCostModel distance{f.locations};
  const Partition dist_part = rasterize_partition(distance, r.g_distance_star, pc.resolution);
  write_partition_pgm(out / "true_distance.pgm", dist_part, K);
  write_stream(out / "true_distance.csv", [&](std::ostream& s) { write_partition_csv(s, dist_part); });
  for (const auto& cp : r.checkpoints) {
    const Partition learned = rasterize_partition(FeatureLinearModel{cp.beta_hat}, cp.g, pc.resolution);
    const std::string stem = "learned_" + std::to_string(cp.n);
    write_partition_pgm(out / (stem + ".pgm"), learned, K);
    write_stream(out / (stem + ".csv"), [&](std::ostream& s) { write_partition_csv(s, learned); });
  }
  write_stream(out / "location_error.csv", [&](std::ostream& s) { write_location_error_csv(s, r.checkpoints); });
  write_stream(out / "checkpoints.csv", [&](std::ostream& s) {
    s << "n,pcs_linear,pcs_distance,hamming,Delta_max\r\n";
    for (const auto& cp : r.checkpoints)
      s << cp.n << ',' << format_double(cp.pcs_linear) << ',' << format_double(cp.pcs_distance) << ','
        << format_double(cp.hamming) << ',' << format_double(cp.Delta_max) << "\r\n";
  });
  for (const auto& cp : r.checkpoints)
    log << "voronoi: n=" << cp.n << " PCS " << format_double(cp.pcs_linear) << " hamming "
        << format_double(cp.hamming) << '\n';
}

void exec_generate(const json& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.contains("facility_seed")) {
    const double sigma = cfg_get<double>(cfg, "sigma");
    const FacilityInstance f = generate_separated_facilities(cfg_get<std::uint64_t>(cfg, "facility_seed"), sigma);
    write_text_file(out / "facility.json", facility_to_json(f));
    log << "generate: facility.json\n";
    return;
  }
  const SyntheticSpec spec = spec_from_json(cfg.at("spec").dump(), SyntheticSpec::desk());
  const long count = std::min<long>(cfg_get<long>(cfg, "count"), spec.n_instances);
  fs::create_directories(out / "instances");
  char name[32];
  for (long i = 0; i < count; ++i) {
    std::snprintf(name, sizeof name, "%05ld.json", i);
    write_text_file(out / "instances" / name, instance_to_json(generate_instance(spec, i)));
  }
  log << "generate: " << count << " instances\n";
}

void execute(const json& cfg, const fs::path& out, int jobs, std::ostream& log) {
  const auto cmd = cfg_get<std::string>(cfg, "command");
  if (cmd == "solve") exec_solve(cfg, out, log);
  else if (cmd == "learn") exec_learn(cfg, out, log);
  else if (cmd == "bench") exec_bench(cfg, out, jobs, log);
  else if (cmd == "voronoi") exec_voronoi(cfg, out, log);
  else if (cmd == "generate") exec_generate(cfg, out, log);
  else throw InputError("unknown command \"" + cmd + "\" in config");
}

json list_outputs(const fs::path& out) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), out).generic_string();
    if (rel != "manifest.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const auto& f : files) list.push_back({{"path", f}, {"sha256", sha256_file(out / f)}});
  return list;
}

json run_and_record(json cfg, const fs::path& out, int jobs, std::ostream& log) {
  cfg["version"] = kConfigSchema;
  fs::create_directories(out);
  json manifest;
  manifest["version"] = "semiot-manifest-v1";
  manifest["command"] = cfg["command"];
  manifest["config"] = cfg;
  json seeds = json::object();
  for (const char* k : {"seed", "facility_seed"})
    if (cfg.contains(k)) seeds[k] = cfg[k];
  if (cfg.contains("spec")) seeds["master_seed"] = cfg["spec"]["master_seed"];
  manifest["seeds"] = seeds;
  manifest["code_version"] = code_version();
  manifest["rng_version"] = Xoshiro256::kVersion;
  manifest["jobs"] = jobs;
  manifest["started"] = utc_now();
  execute(cfg, out, jobs, log);
  manifest["finished"] = utc_now();
  manifest["outputs"] = list_outputs(out);
  write_text_file(out / "manifest.json", manifest.dump(2));
  return manifest;
}

json embed_instance(const std::string& path) { return parse_json(instance_to_json(load_instance(path)), path); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semidiscrete optimal transport with learned linear costs"};
  app.require_subcommand(1);
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir, config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--config", config_path, "semiot-config-v1 JSON; flags override its keys")
        ->check(CLI::ExistingFile);
  };

  // solve
  auto* solve = app.add_subcommand("solve", "Known-cost dual weights by online stochastic approximation");
  std::string instance_path;
  long iters = 1000, trace_every = 0, verify_samples = 1'000'000;
  double verify_tol = 0.0;
  LearnerFlags solve_flags;
  common(solve);
  solve->add_option("--instance", instance_path, "Instance JSON")->required();
  auto* o_iters = solve->add_option("--iters", iters, "Iterations")->check(CLI::PositiveNumber);
  auto* o_trace = solve->add_option("--trace-every", trace_every, "Trace stride (0 = log-spaced)")
                      ->check(CLI::NonNegativeNumber);
  auto* o_vtol = solve->add_option("--verify-tol", verify_tol, "Fail (exit 3) if max assignment residual exceeds this")
                     ->check(CLI::NonNegativeNumber);
  auto* o_vs = solve->add_option("--verify-samples", verify_samples, "Samples for the residual check")
                   ->check(CLI::PositiveNumber);
  solve_flags.attach(solve, false);

  // learn
  auto* learn = app.add_subcommand("learn", "Run the semi-myopic learner on one instance");
  long horizon = 1000, oracle_iters = 2'000'000, oracle_check = 200'000, window = 100;
  double oracle_tol = 0.03;
  bool score = false;
  LearnerFlags learn_flags;
  common(learn);
  learn->add_option("--instance", instance_path, "Instance JSON")->required();
  auto* o_lh = learn->add_option("--horizon", horizon, "Steps")->check(CLI::PositiveNumber);
  auto* o_score = learn->add_flag("--score", score, "Solve g* and score each decision");
  auto* o_loi = learn->add_option("--oracle-iters", oracle_iters, "Oracle SA iterations")->check(CLI::PositiveNumber);
  auto* o_lot = learn->add_option("--oracle-tol", oracle_tol, "Oracle residual tolerance")->check(CLI::PositiveNumber);
  auto* o_loc = learn->add_option("--oracle-check-samples", oracle_check, "Oracle verification samples")
                    ->check(CLI::PositiveNumber);
  auto* o_win = learn->add_option("--window", window, "PCS smoothing window")->check(CLI::PositiveNumber);
  learn_flags.attach(learn, true);

  // bench
  auto* bench = app.add_subcommand("bench", "Synthetic PCS benchmark and rate diagnostics");
  std::string profile = "desk";
  long instances = 0, runs = 0, bench_horizon = 0;
  bool with_rates = false;
  LearnerFlags bench_flags;
  common(bench);
  bench->add_option("--spec", config_path, "Alias of --config")->check(CLI::ExistingFile);
  auto* o_prof = bench->add_option("--profile", profile, "Scale profile")->check(CLI::IsMember({"desk", "paper"}));
  auto* o_inst = bench->add_option("--instances", instances, "Number of instances")->check(CLI::PositiveNumber);
  auto* o_runs = bench->add_option("--runs", runs, "Runs per instance")->check(CLI::PositiveNumber);
  auto* o_bh = bench->add_option("--horizon", bench_horizon, "Steps per run")->check(CLI::PositiveNumber);
  auto* o_rs = bench->add_flag("--rate-study", with_rates, "Append the long-horizon rate study to rates.csv");
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_flags.attach(bench, true);

  // voronoi
  auto* vor = app.add_subcommand("voronoi", "Learn facility locations and export partitions");
  std::string facility_path;
  std::uint64_t facility_seed = 1;
  long vor_horizon = 1'000'000;
  int resolution = 512;
  std::vector<long> checkpoints{10'000, 100'000, 1'000'000};
  LearnerFlags vor_flags;
  common(vor);
  auto* o_fac = vor->add_option("--instance", facility_path, "Facility JSON (semiot-facility-v1)");
  auto* o_gen = vor->add_option("--generate", facility_seed, "Generate a separated 4-facility instance from this seed");
  o_fac->excludes(o_gen);
  auto* o_vh = vor->add_option("--horizon", vor_horizon, "Steps")->check(CLI::PositiveNumber);
  auto* o_res = vor->add_option("--resolution", resolution, "Raster resolution")->check(CLI::Range(16, 8192));
  auto* o_cp = vor->add_option("--checkpoints", checkpoints, "Checkpoint times")->check(CLI::PositiveNumber);
  auto* o_voi = vor->add_option("--oracle-iters", oracle_iters, "Oracle SA iterations")->check(CLI::PositiveNumber);
  vor_flags.attach(vor, true);

  // generate
  auto* gen = app.add_subcommand("generate", "Write synthetic instance files");
  long count = 1;
  double gen_sigma = 0.02;
  common(gen);
  auto* o_gprof = gen->add_option("--profile", profile, "Scale profile")->check(CLI::IsMember({"desk", "paper"}));
  auto* o_count = gen->add_option("--count", count, "Instances to write")->check(CLI::PositiveNumber);
  auto* o_gseed = gen->add_option("--seed", facility_seed, "Master seed");
  auto* o_gfac = gen->add_flag("--facility", "Write a 4-facility instance instead");
  auto* o_gsig = gen->add_option("--sigma", gen_sigma, "Facility noise level")->check(CLI::NonNegativeNumber);

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output checksums");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--out", out_dir, "Output directory")->required();
  replay->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (replay->parsed()) {
      const json old = parse_json(read_text_file(manifest_path), manifest_path);
      const json fresh = run_and_record(old.at("config"), out_dir, jobs, err);
      std::map<std::string, std::string> want, got;
      for (const auto& o : old.at("outputs")) want[o["path"]] = o["sha256"];
      for (const auto& o : fresh["outputs"]) got[o["path"]] = o["sha256"];
      if (want == got) {
        out << "replay: " << got.size() << " outputs match\n";
        return kOk;
      }
      for (const auto& [path, sum] : want) {
        auto it = got.find(path);
        if (it == got.end()) err << "missing: " << path << '\n';
        else if (it->second != sum) err << "differs: " << path << '\n';
      }
      for (const auto& [path, sum] : got)
        if (!want.count(path)) err << "extra: " << path << '\n';
      return kMismatch;
    }

    json cfg = load_config_file(config_path);
    if (solve->parsed()) {
      cfg["command"] = "solve";
      cfg["instance"] = embed_instance(instance_path);
      put_flag(cfg, o_iters, "iters", iters);
      put_flag(cfg, o_trace, "trace_every", trace_every);
      put_flag(cfg, o_vtol, "verify_tol", verify_tol);
      put_flag(cfg, o_vs, "verify_samples", verify_samples);
      solve_flags.merge(cfg);
      if (cfg_get<long>(cfg, "iters") < 1) throw ArgumentError("iters must be >= 1");
    } else if (learn->parsed()) {
      cfg["command"] = "learn";
      cfg["instance"] = embed_instance(instance_path);
      put_flag(cfg, o_lh, "horizon", horizon);
      put_flag(cfg, o_score, "score", score);
      put_flag(cfg, o_loi, "oracle_iters", oracle_iters);
      put_flag(cfg, o_lot, "oracle_tol", oracle_tol);
      put_flag(cfg, o_loc, "oracle_check_samples", oracle_check);
      put_flag(cfg, o_win, "window", window);
      learn_flags.merge(cfg);
    } else if (bench->parsed()) {
      json file = cfg;
      if (!file.contains("profile") || o_prof->count() > 0) file["profile"] = profile;
      const std::string prof = file["profile"];
      SyntheticSpec base = prof == "paper" ? SyntheticSpec::paper() : SyntheticSpec::desk();
      file.erase("command");
      file.erase("profile");
      file.erase("rate_study");
      SyntheticSpec spec = spec_from_json(file.dump(), base);
      if (o_inst->count()) spec.n_instances = instances;
      if (o_runs->count()) spec.runs_per_instance = runs;
      if (o_bh->count()) spec.horizon = bench_horizon;
      if (bench_flags.o_alpha->count()) spec.sa_alpha = bench_flags.alpha;
      if (bench_flags.o_seed->count()) spec.master_seed = bench_flags.seed;
      if (bench_flags.o_mode->count() || bench_flags.o_a->count()) {
        const std::string mode = bench_flags.o_mode->count() ? bench_flags.explore_mode
                                 : spec.explore.mode == ExplorationSchedule::Mode::Deterministic ? "det"
                                                                                                 : "prob";
        const double a = bench_flags.o_a->count() ? bench_flags.explore_a : spec.explore.a;
        spec.explore = mode == "det" ? ExplorationSchedule::deterministic(a) : ExplorationSchedule::probabilistic(a);
      }
      if (bench_flags.o_rho->count()) spec.ridge = RidgePolicy::constant(bench_flags.rho);
      if (bench_flags.o_sched->count()) spec.ridge = RidgePolicy::paper_schedule();
      spec.pcs_window = std::min(spec.pcs_window, spec.horizon);
      spec.validate();
      json eff;
      eff["command"] = "bench";
      eff["profile"] = prof;
      eff["rate_study"] = o_rs->count() > 0 || (cfg.contains("rate_study") && cfg["rate_study"].get<bool>());
      eff["spec"] = json::parse(spec_to_json(spec));
      cfg = eff;
    } else if (vor->parsed()) {
      cfg["command"] = "voronoi";
      if (o_fac->count()) {
        cfg["facility"] = parse_json(facility_to_json(load_facility(facility_path)), facility_path);
      } else if (o_gen->count() || !cfg.contains("facility")) {
        cfg["facility"] = parse_json(facility_to_json(generate_separated_facilities(facility_seed)), "generated");
      }
      put_flag(cfg, o_vh, "horizon", vor_horizon);
      put_flag(cfg, o_res, "resolution", resolution);
      put_flag(cfg, o_cp, "checkpoints", checkpoints);
      put_flag(cfg, o_voi, "oracle_iters", oracle_iters);
      if (!cfg.contains("oracle_tol")) cfg["oracle_tol"] = 0.01;
      if (!cfg.contains("oracle_check_samples")) cfg["oracle_check_samples"] = 200'000;
      vor_flags.merge(cfg);
    } else if (gen->parsed()) {
      cfg["command"] = "generate";
      if (o_gfac->count()) {
        cfg["facility_seed"] = facility_seed;
        put_flag(cfg, o_gsig, "sigma", gen_sigma);
      } else {
        SyntheticSpec base = profile == "paper" ? SyntheticSpec::paper() : SyntheticSpec::desk();
        json file = cfg.contains("spec") ? cfg["spec"] : json::object();
        SyntheticSpec spec = spec_from_json(file.dump(), base);
        if (o_gseed->count()) spec.master_seed = facility_seed;
        (void)o_gprof;
        cfg["spec"] = json::parse(spec_to_json(spec));
        put_flag(cfg, o_count, "count", count);
      }
    }
    run_and_record(cfg, out_dir, jobs, err);
    out << "wrote " << out_dir << '\n';
    return kOk;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedMode& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const OracleFailure& e) {
    err << "oracle failure: " << e.what() << '\n';
    return kOracle;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const CheckpointError& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  }
}

}  // namespace semiot::cli
