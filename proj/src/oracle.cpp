#include "semiot/oracle.hpp"

#include <cmath>

#include <json.hpp>

#include "semiot/io.hpp"

namespace semiot {

using nlohmann::json;

OracleResult solve_gstar_long_sa(const TransportInstance& instance, const OracleOptions& opt) {
  instance.validate();
  return solve_gstar_long_sa(instance.costs, instance.p, instance.sampler, opt);
}

OracleResult solve_gstar_quantile_k2(const TransportInstance& instance, long n_samples, std::uint64_t seed) {
  instance.validate();
  return solve_gstar_quantile_k2(instance.costs, instance.p, instance.sampler, n_samples, seed);
}

std::string oracle_to_json(const OracleResult& r) {
  json doc;
  doc["version"] = "semiot-oracle-v1";
  doc["g_star"] = std::vector<double>(r.g_star.data(), r.g_star.data() + r.g_star.size());
  doc["method"] = r.method == OracleResult::Method::LongSA ? "long-sa" : "quantile-k2";
  doc["iterations"] = r.iterations;
  doc["residual"] = std::vector<double>(r.residual.data(), r.residual.data() + r.residual.size());
  doc["seed"] = r.seed;
  return doc.dump(2);
}

OracleResult oracle_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("version") != "semiot-oracle-v1") throw InputError("oracle: unsupported version");
    OracleResult r;
    const auto g = doc.at("g_star").get<std::vector<double>>();
    r.g_star = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Index>(g.size()));
    r.method = doc.at("method") == "long-sa" ? OracleResult::Method::LongSA : OracleResult::Method::QuantileK2;
    r.iterations = doc.at("iterations").get<long>();
    const auto res = doc.at("residual").get<std::vector<double>>();
    r.residual = Eigen::Map<const Eigen::VectorXd>(res.data(), static_cast<Index>(res.size()));
    r.seed = doc.at("seed").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("oracle: ") + e.what());
  }
}

std::vector<double> windowed_mean(const std::vector<std::uint8_t>& flags, long window) {
  if (window < 1) throw ArgumentError("windowed_mean: window must be positive");
  std::vector<double> out(flags.size());
  long sum = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    sum += flags[i];
    if (static_cast<long>(i) >= window) sum -= flags[i - static_cast<std::size_t>(window)];
    const long len = std::min<long>(window, static_cast<long>(i) + 1);
    out[i] = static_cast<double>(sum) / static_cast<double>(len);
  }
  return out;
}

ScoreReport score_run(const RunTrace& trace, const std::optional<Truth>& truth, long window) {
  if (!truth) throw ArgumentError("score_run: truth is required");
  const auto& model = truth->model;
  if (model.dimension() != trace.sampler.dimension)
    throw ArgumentError("score_run: truth dimension does not match the trace contexts");
  ContextSampler replay(trace.sampler, trace.context_seed);
  ScoreReport rep;
  const std::size_t T = trace.rows.size();
  rep.n.reserve(T);
  rep.correct_plugin.reserve(T);
  rep.correct_policy.reserve(T);
  long wrong_plugin = 0, wrong_policy = 0;
  Eigen::VectorXd x(model.dimension());
  for (const auto& row : trace.rows) {
    replay.sample(x);
    if (context_hash(x) != row.x_hash) throw ArgumentError("score_run: replayed context does not match trace");
    const Index best = decide(model, truth->g_star, x);
    const std::uint8_t ok_hat = row.pi_hat == best;
    const std::uint8_t ok_pi = row.pi == best;
    wrong_plugin += 1 - ok_hat;
    wrong_policy += 1 - ok_pi;
    rep.n.push_back(row.n);
    rep.correct_plugin.push_back(ok_hat);
    rep.correct_policy.push_back(ok_pi);
    rep.cumulative_incorrect_plugin.push_back(wrong_plugin);
    rep.cumulative_incorrect_policy.push_back(wrong_policy);
  }
  rep.pcs_plugin_window = windowed_mean(rep.correct_plugin, window);
  rep.pcs_policy_window = windowed_mean(rep.correct_policy, window);
  for (const auto& s : trace.snapshots) {
    rep.snapshot_n.push_back(s.n);
    rep.delta_norm.push_back(delta_norm(s.g, truth->g_star));
    rep.Delta_max.push_back(s.beta_hat.size() == 0
                                ? std::numeric_limits<double>::quiet_NaN()
                                : (s.beta_hat - model.beta).rowwise().norm().maxCoeff());
  }
  return rep;
}

void write_score_csv(std::ostream& out, const ScoreReport& r) {
  out << "n,correct_plugin,correct_policy,pcs_plugin_window,pcs_policy_window,cum_incorrect_plugin,"
         "cum_incorrect_policy\r\n";
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    out << r.n[i] << ',' << int(r.correct_plugin[i]) << ',' << int(r.correct_policy[i]) << ','
        << format_double(r.pcs_plugin_window[i]) << ',' << format_double(r.pcs_policy_window[i]) << ','
        << r.cumulative_incorrect_plugin[i] << ',' << r.cumulative_incorrect_policy[i] << "\r\n";
  }
}

}  // namespace semiot
