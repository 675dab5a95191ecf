#include "semiot/learner.hpp"

#include <json.hpp>

namespace semiot {

using nlohmann::json;

void LearnerConfig::validate() const {
  if (!(alpha > 0.0)) throw ArgumentError("learner: alpha must be positive");
  schedule.validate();
  ridge.validate();
}

LearnerState::LearnerState(Index K, Index feature_dim, SamplerSpec sampler, NoiseSpec noise_spec,
                           const LearnerConfig& config)
    : contexts(std::move(sampler), derive_seed(config.seed, streams::contexts)),
      noise(noise_spec, derive_seed(config.seed, streams::noise)),
      explore_rng(derive_seed(config.seed, streams::exploration)) {
  config.validate();
  if (K < 1 || feature_dim < 1) throw ArgumentError("learner: K and feature dimension must be positive");
  g = config.g0.size() == 0 ? DualWeights::Zero(K) : config.g0;
  if (g.size() != K) throw ArgumentError("learner: g0 size mismatch");
  accs.assign(static_cast<std::size_t>(K), RidgeAccumulator(feature_dim));
  if (config.ridge.mode == RidgePolicy::Mode::Constant)
    rls.assign(static_cast<std::size_t>(K), RLSState(feature_dim, config.ridge));
  beta_hat = LinearCostModel(Eigen::MatrixXd::Zero(K, feature_dim));
  schedule = config.schedule;
  ridge = config.ridge;
  alpha = config.alpha;
  context_seed = derive_seed(config.seed, streams::contexts);
}

void refresh_estimate(LearnerState& state, Index k, const Eigen::VectorXd& features, double w) {
  const auto ku = static_cast<std::size_t>(k);
  absorb(state.accs[ku], features, w);
  if (state.ridge.mode == RidgePolicy::Mode::Constant) {
    rls_update(state.rls[ku], features, w);
    state.beta_hat.beta.row(k) = state.rls[ku].beta.transpose();
  } else {
    // rho is indexed by the global time of the new estimate, n + 1.
    state.beta_hat.beta.row(k) = solve_beta(state.accs[ku], state.ridge.rho_at(state.n + 1)).transpose();
  }
}

LearnerState make_learner(const TransportInstance& instance, const LearnerConfig& config) {
  instance.validate();
  return LearnerState(instance.K, instance.d, instance.sampler, instance.noise, config);
}

StepRecord learner_step(LearnerState& state, const TransportInstance& instance) {
  return learner_step(state, LinearObservation{instance});
}

double max_coefficient_error(const LinearCostModel& estimate, const LinearCostModel& truth) {
  return (estimate.beta - truth.beta).rowwise().norm().maxCoeff();
}

RunTrace run_learner(const TransportInstance& instance, const LearnerConfig& config, long horizon,
                     const std::optional<Truth>& truth, const RunOptions& options) {
  LearnerState state = make_learner(instance, config);
  return run_learner_with(state, LinearObservation{instance}, horizon, truth, options);
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Eigen::VectorXd r = m.row(i).transpose();
    rows.push_back(vec_json(r));
  }
  return rows;
}

Eigen::VectorXd json_vec(const json& j, Index expect) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Index>(v.size()) != expect) throw CorruptCheckpoint("checkpoint: vector has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expect);
}

Eigen::MatrixXd json_mat(const json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw CorruptCheckpoint("checkpoint: matrix has wrong row count");
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) m.row(i) = json_vec(j[static_cast<std::size_t>(i)], cols).transpose();
  return m;
}

json rng_json(const Xoshiro256::State& st) {
  return {{"s", std::vector<std::uint64_t>(st.s.begin(), st.s.end())},
          {"has_spare", st.has_spare},
          {"spare", st.spare}};
}

Xoshiro256::State json_rng(const json& j) {
  Xoshiro256::State st;
  const auto s = j.at("s").get<std::vector<std::uint64_t>>();
  if (s.size() != 4) throw CorruptCheckpoint("checkpoint: bad generator state");
  std::copy(s.begin(), s.end(), st.s.begin());
  st.has_spare = j.at("has_spare").get<bool>();
  st.spare = j.at("spare").get<double>();
  return st;
}

const char* ridge_mode_name(RidgePolicy::Mode m) {
  return m == RidgePolicy::Mode::Constant ? "constant" : "paper-schedule";
}

}  // namespace

std::string checkpoint(const LearnerState& state) {
  json doc;
  doc["version"] = kCheckpointSchema;
  doc["ridge_mode"] = ridge_mode_name(state.ridge.mode);
  doc["rho"] = state.ridge.rho;
  doc["n"] = state.n;
  doc["K"] = state.alternatives();
  doc["d"] = state.beta_hat.dimension();
  doc["alpha"] = state.alpha;
  doc["schedule"] = {
      {"mode", state.schedule.mode == ExplorationSchedule::Mode::Deterministic ? "det" : "prob"},
      {"a", state.schedule.a}};
  doc["g"] = vec_json(state.g);
  doc["beta_hat"] = mat_json(state.beta_hat.beta);
  json accs = json::array();
  for (const auto& acc : state.accs)
    accs.push_back({{"V", mat_json(acc.V)}, {"b", vec_json(acc.b)}, {"count", acc.count}});
  doc["accumulators"] = accs;
  json rls = json::array();
  for (const auto& r : state.rls)
    rls.push_back({{"P", mat_json(r.P)}, {"beta", vec_json(r.beta)}, {"count", r.count}});
  doc["rls"] = rls;
  const auto cs = state.contexts.state();
  doc["contexts"] = {{"rng", rng_json(cs.rng)}, {"cursor", cs.cursor}};
  doc["noise"] = rng_json(state.noise.state());
  doc["exploration"] = rng_json(state.explore_rng.state());
  doc["context_seed"] = state.context_seed;
  return doc.dump();
}

void restore_into(LearnerState& state, std::string_view blob) {
  json doc;
  try {
    doc = json::parse(blob);
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint: unparsable blob: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version")) throw CorruptCheckpoint("checkpoint: missing version");
  if (doc["version"] != kCheckpointSchema)
    throw CheckpointVersionError("checkpoint: unsupported version " + doc["version"].dump());
  try {
    if (doc.at("ridge_mode").get<std::string>() != ridge_mode_name(state.ridge.mode))
      throw CheckpointVersionError("checkpoint: ridge mode " + doc.at("ridge_mode").get<std::string>() +
                                   " does not match the configured mode " +
                                   ridge_mode_name(state.ridge.mode));
    const Index K = doc.at("K").get<Index>();
    const Index d = doc.at("d").get<Index>();
    if (K != state.alternatives() || d != state.beta_hat.dimension())
      throw CorruptCheckpoint("checkpoint: shape does not match the instance");
    LearnerState next = state;
    next.ridge.rho = doc.at("rho").get<double>();
    next.n = doc.at("n").get<long>();
    next.alpha = doc.at("alpha").get<double>();
    const auto& sch = doc.at("schedule");
    next.schedule.mode = sch.at("mode").get<std::string>() == "det" ? ExplorationSchedule::Mode::Deterministic
                                                                   : ExplorationSchedule::Mode::Probabilistic;
    next.schedule.a = sch.at("a").get<double>();
    next.g = json_vec(doc.at("g"), K);
    next.beta_hat.beta = json_mat(doc.at("beta_hat"), K, d);
    const auto& accs = doc.at("accumulators");
    if (static_cast<Index>(accs.size()) != K) throw CorruptCheckpoint("checkpoint: accumulator count");
    for (Index k = 0; k < K; ++k) {
      const auto& a = accs[static_cast<std::size_t>(k)];
      auto& acc = next.accs[static_cast<std::size_t>(k)];
      acc.V = json_mat(a.at("V"), d, d);
      acc.b = json_vec(a.at("b"), d);
      acc.count = a.at("count").get<long>();
    }
    const auto& rls = doc.at("rls");
    if (rls.size() != next.rls.size()) throw CorruptCheckpoint("checkpoint: RLS state count");
    for (std::size_t k = 0; k < next.rls.size(); ++k) {
      next.rls[k].P = json_mat(rls[k].at("P"), d, d);
      next.rls[k].beta = json_vec(rls[k].at("beta"), d);
      next.rls[k].count = rls[k].at("count").get<long>();
      next.rls[k].rho = next.ridge.rho;
    }
    const auto& cs = doc.at("contexts");
    next.contexts.set_state({json_rng(cs.at("rng")), cs.at("cursor").get<Index>()});
    next.noise.set_state(json_rng(doc.at("noise")));
    next.explore_rng.set_state(json_rng(doc.at("exploration")));
    next.context_seed = doc.at("context_seed").get<std::uint64_t>();
    state = std::move(next);
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint: ") + e.what());
  }
}

LearnerState restore(std::string_view blob, const TransportInstance& instance, const LearnerConfig& config) {
  LearnerState state = make_learner(instance, config);
  restore_into(state, blob);
  return state;
}

}  // namespace semiot
