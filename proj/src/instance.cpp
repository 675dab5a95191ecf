#include "semiot/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semiot/errors.hpp"

namespace semiot {

using nlohmann::json;

ContextSampler::ContextSampler(SamplerSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  if (spec_.dimension < 1) throw ArgumentError("sampler dimension must be positive");
  if (spec_.kind == SamplerKind::Replay) {
    if (spec_.points.cols() == 0 || spec_.points.rows() != spec_.dimension)
      throw ArgumentError("replay sampler needs a non-empty d x m point matrix");
  }
}

void ContextSampler::sample(Eigen::Ref<Eigen::VectorXd> out) {
  switch (spec_.kind) {
    case SamplerKind::UnitSphere:
      sample_unit_sphere(rng_, out);
      break;
    case SamplerKind::UnitBox:
      sample_unit_box(rng_, out);
      break;
    case SamplerKind::Replay:
      out = spec_.points.col(cursor_);
      cursor_ = (cursor_ + 1) % spec_.points.cols();
      break;
  }
}

Eigen::VectorXd ContextSampler::sample() {
  Eigen::VectorXd x(spec_.dimension);
  sample(x);
  return x;
}

void ContextSampler::sample_batch(Eigen::Ref<Eigen::MatrixXd> out) {
  for (Index j = 0; j < out.cols(); ++j) sample(out.col(j));
}

void ContextSampler::set_state(const State& st) {
  rng_.set_state(st.rng);
  cursor_ = st.cursor;
}

NoiseModel::NoiseModel(NoiseSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
  if (spec_.kind == NoiseKind::Gaussian && !(spec_.sigma >= 0.0))
    throw ArgumentError("noise sigma must be non-negative");
}

double NoiseModel::draw() {
  if (spec_.kind == NoiseKind::None) return 0.0;
  return spec_.sigma * rng_.normal();
}

void TransportInstance::validate() const {
  if (d < 1) throw ArgumentError("instance: d must be positive");
  if (K < 1) throw ArgumentError("instance: K must be positive");
  if (p.size() != K) throw ArgumentError("instance: p must have K entries");
  if ((p.array() <= 0.0).any()) throw ArgumentError("instance: every p_k must be positive");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw ArgumentError("instance: p must sum to 1");
  if (costs.alternatives() != K || costs.dimension() != d)
    throw ArgumentError("instance: beta must be K x d");
  if (!costs.all_finite()) throw ArgumentError("instance: beta has non-finite entries");
  if (sampler.dimension != d) throw ArgumentError("instance: sampler dimension must equal d");
  if (noise.kind == NoiseKind::Gaussian && !(noise.sigma >= 0.0))
    throw ArgumentError("instance: noise sigma must be non-negative");
}

namespace {

const char* sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::UnitSphere: return "unit-sphere";
    case SamplerKind::UnitBox: return "unit-box";
    case SamplerKind::Replay: return "replay";
  }
  return "?";
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& rows, Index expect_cols, const char* what) {
  if (!rows.is_array()) throw InputError(std::string(what) + " must be an array of rows");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), expect_cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != expect_cols)
      throw InputError(std::string(what) + ": row " + std::to_string(i) + " has wrong length");
    for (Index j = 0; j < expect_cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace

std::string instance_to_json(const TransportInstance& inst) {
  json doc;
  doc["version"] = kInstanceSchema;
  doc["d"] = inst.d;
  doc["K"] = inst.K;
  doc["p"] = std::vector<double>(inst.p.data(), inst.p.data() + inst.p.size());
  doc["beta"] = matrix_rows(inst.costs.beta);
  json sampler{{"kind", sampler_name(inst.sampler.kind)}};
  if (inst.sampler.kind == SamplerKind::Replay)
    sampler["points"] = matrix_rows(inst.sampler.points.transpose());
  doc["sampler"] = sampler;
  if (inst.noise.kind == NoiseKind::Gaussian)
    doc["noise"] = {{"kind", "gaussian"}, {"sigma", inst.noise.sigma}};
  else
    doc["noise"] = {{"kind", "none"}};
  doc["seed"] = inst.seed;
  return doc.dump(2);
}

TransportInstance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("instance: malformed JSON: ") + e.what());
  }
  try {
    if (doc.value("version", std::string{}) != kInstanceSchema)
      throw InputError("instance: expected version \"" + std::string(kInstanceSchema) + "\"");
    TransportInstance inst;
    inst.d = doc.at("d").get<Index>();
    inst.K = doc.at("K").get<Index>();
    if (inst.K < 2) throw InputError("instance: K must be at least 2");
    if (inst.d < 1) throw InputError("instance: d must be positive");
    const auto p = doc.at("p").get<std::vector<double>>();
    inst.p = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Index>(p.size()));
    inst.costs = LinearCostModel(rows_matrix(doc.at("beta"), inst.d, "beta"));
    const auto& s = doc.at("sampler");
    const auto kind = s.at("kind").get<std::string>();
    inst.sampler.dimension = inst.d;
    if (kind == "unit-sphere") {
      inst.sampler.kind = SamplerKind::UnitSphere;
    } else if (kind == "unit-box") {
      inst.sampler.kind = SamplerKind::UnitBox;
    } else if (kind == "replay") {
      inst.sampler.kind = SamplerKind::Replay;
      inst.sampler.points = rows_matrix(s.at("points"), inst.d, "sampler.points").transpose();
    } else {
      throw InputError("instance: unknown sampler kind \"" + kind + "\"");
    }
    const auto& n = doc.at("noise");
    const auto nkind = n.at("kind").get<std::string>();
    if (nkind == "gaussian")
      inst.noise = NoiseSpec::gaussian(n.at("sigma").get<double>());
    else if (nkind == "none")
      inst.noise = NoiseSpec::none();
    else
      throw InputError("instance: unknown noise kind \"" + nkind + "\"");
    inst.seed = doc.value("seed", std::uint64_t{0});
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw InputError(std::string("instance: ") + e.what());
  } catch (const ArgumentError& e) {
    throw InputError(e.what());
  }
}

TransportInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

void save_instance(const TransportInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << instance_to_json(instance) << '\n';
}

}  // namespace semiot
