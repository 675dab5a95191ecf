#include "semiot/voronoi.hpp"

#include <cmath>

#include <json.hpp>

#include "semiot/errors.hpp"
#include "semiot/io.hpp"

namespace semiot {

using nlohmann::json;

void FacilityInstance::validate() const {
  const Index K = alternatives();
  if (K < 1) throw ArgumentError("facility: need at least one facility");
  if ((locations.array() < 0.0).any() || (locations.array() > 1.0).any() || !locations.allFinite())
    throw ArgumentError("facility: locations must lie in the unit square");
  if (p.size() != K) throw ArgumentError("facility: p must have one entry per facility");
  if (!(p.array() > 0.0).all() || std::abs(p.sum() - 1.0) > 1e-12)
    throw ArgumentError("facility: p must be a positive probability vector");
  if (!(sigma >= 0.0)) throw ArgumentError("facility: sigma must be non-negative");
}

std::string facility_to_json(const FacilityInstance& f) {
  json doc;
  doc["version"] = kFacilitySchema;
  json locs = json::array();
  for (Index k = 0; k < f.alternatives(); ++k) locs.push_back({f.locations(0, k), f.locations(1, k)});
  doc["locations"] = locs;
  doc["p"] = std::vector<double>(f.p.data(), f.p.data() + f.p.size());
  doc["sigma"] = f.sigma;
  doc["seed"] = f.seed;
  return doc.dump(2);
}

FacilityInstance facility_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("facility: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("version") != kFacilitySchema)
      throw InputError("facility: expected version \"" + std::string(kFacilitySchema) + "\"");
    FacilityInstance f;
    const auto& locs = doc.at("locations");
    f.locations.resize(2, static_cast<Index>(locs.size()));
    for (std::size_t k = 0; k < locs.size(); ++k) {
      const auto xy = locs[k].get<std::vector<double>>();
      if (xy.size() != 2) throw InputError("facility: each location needs two coordinates");
      f.locations(0, static_cast<Index>(k)) = xy[0];
      f.locations(1, static_cast<Index>(k)) = xy[1];
    }
    const auto p = doc.at("p").get<std::vector<double>>();
    f.p = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Index>(p.size()));
    if (doc.contains("sigma")) f.sigma = doc["sigma"].get<double>();
    if (doc.contains("seed")) f.seed = doc["seed"].get<std::uint64_t>();
    f.validate();
    return f;
  } catch (const json::exception& e) {
    throw InputError(std::string("facility: ") + e.what());
  } catch (const ArgumentError& e) {
    throw InputError(e.what());
  }
}

FacilityInstance load_facility(const std::filesystem::path& path) { return facility_from_json(read_text_file(path)); }

Eigen::Vector3d distance_features(const Eigen::Vector2d& x) { return {1.0, -2.0 * x[0], -2.0 * x[1]}; }

TransformedObservation transform_observation(const Eigen::Vector2d& x, double w) {
  return {distance_features(x), w * w - x.squaredNorm()};
}

LinearCostModel true_feature_model(const FacilityInstance& f, double noise_var) {
  Eigen::MatrixXd beta(f.alternatives(), 3);
  for (Index k = 0; k < f.alternatives(); ++k) {
    beta(k, 0) = noise_var + f.locations.col(k).squaredNorm();
    beta(k, 1) = f.locations(0, k);
    beta(k, 2) = f.locations(1, k);
  }
  return LinearCostModel(std::move(beta));
}

LocationEstimate extract_location(const Eigen::Vector3d& beta_hat, double noise_var) {
  LocationEstimate e;
  e.location = beta_hat.tail<2>();
  e.intercept_residual = beta_hat[0] - (noise_var + e.location.squaredNorm());
  return e;
}

double hamming_fraction(const Partition& a, const Partition& b) {
  if (a.resolution != b.resolution) throw ArgumentError("hamming_fraction: resolutions differ");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) diff += a.cells[i] != b.cells[i];
  return static_cast<double>(diff) / static_cast<double>(a.cells.size());
}

void write_partition_pgm(const std::filesystem::path& path, const Partition& part, Index K) {
  std::vector<std::uint8_t> px(part.cells.size());
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = K > 1 ? static_cast<std::uint8_t>(part.cells[i] * 255 / (K - 1)) : 0;
  write_pgm(path, part.resolution, part.resolution, px);
}

void write_partition_csv(std::ostream& out, const Partition& part) {
  for (int i = 0; i < part.resolution; ++i) {
    for (int j = 0; j < part.resolution; ++j) {
      if (j) out << ',';
      out << part.at(i, j) + 1;
    }
    out << "\r\n";
  }
}

FacilityInstance generate_separated_facilities(std::uint64_t seed, double sigma, double jitter) {
  Xoshiro256 rng(derive_seed(seed, streams::instance));
  FacilityInstance f;
  f.locations.resize(2, 4);
  const double centres[4][2] = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 2; ++c) f.locations(c, k) = centres[k][c] + jitter * (2.0 * rng.uniform() - 1.0);
  f.p = Eigen::VectorXd::Constant(4, 0.25);
  f.sigma = sigma;
  f.seed = seed;
  f.validate();
  return f;
}

PartitionResult run_partition_learning(const FacilityInstance& facility, long horizon, const PartitionConfig& cfg) {
  facility.validate();
  if (horizon < 1) throw ArgumentError("run_partition_learning: horizon must be >= 1");
  const double noise_var = facility.sigma * facility.sigma;
  const LinearCostModel truth_model = true_feature_model(facility, noise_var);
  const FeatureLinearModel truth_raw{truth_model};
  const DistanceCostModel distance{facility.locations};

  OracleOptions oo = cfg.oracle;
  if (oo.seed == 0) oo.seed = facility.seed;
  const OracleResult lin = solve_gstar_long_sa(truth_raw, facility.p, facility.sampler(), oo);
  const OracleResult dist = solve_gstar_long_sa(distance, facility.p, facility.sampler(), oo);

  LearnerState state(facility.alternatives(), 3, facility.sampler(), NoiseSpec::gaussian(facility.sigma),
                     cfg.learner);
  const Partition true_part = rasterize_partition(truth_raw, lin.g_star, cfg.resolution);

  // Fixed evaluation contexts shared by every checkpoint.
  ContextSampler eval(facility.sampler(), derive_seed(facility.seed, streams::verification));
  Eigen::MatrixXd xs(2, cfg.pcs_samples);
  eval.sample_batch(xs);
  const Eigen::MatrixXd c_lin = truth_raw.costs(xs);
  const Eigen::MatrixXd c_dist = distance.costs(xs);
  std::vector<Index> best_lin(static_cast<std::size_t>(cfg.pcs_samples)),
      best_dist(static_cast<std::size_t>(cfg.pcs_samples));
  for (Index j = 0; j < cfg.pcs_samples; ++j) {
    best_lin[static_cast<std::size_t>(j)] = argmin_adjusted(c_lin.col(j), lin.g_star);
    best_dist[static_cast<std::size_t>(j)] = argmin_adjusted(c_dist.col(j), dist.g_star);
  }

  std::vector<PartitionCheckpoint> cps;
  std::size_t next = 0;
  RunOptions ro;
  ro.snapshot_every = -1;
  ro.hooks.push_back([&](const StepRecord& rec, const LearnerState& st) {
    if (next >= cfg.checkpoints.size() || rec.n != cfg.checkpoints[next]) return;
    ++next;
    PartitionCheckpoint cp;
    cp.n = rec.n;
    cp.g = st.g;
    cp.beta_hat = st.beta_hat;
    const FeatureLinearModel learned{st.beta_hat};
    const Eigen::MatrixXd c = learned.costs(xs);
    long ok_lin = 0, ok_dist = 0;
    for (Index j = 0; j < cfg.pcs_samples; ++j) {
      const Index k = argmin_adjusted(c.col(j), st.g);
      ok_lin += k == best_lin[static_cast<std::size_t>(j)];
      ok_dist += k == best_dist[static_cast<std::size_t>(j)];
    }
    cp.pcs_linear = static_cast<double>(ok_lin) / static_cast<double>(cfg.pcs_samples);
    cp.pcs_distance = static_cast<double>(ok_dist) / static_cast<double>(cfg.pcs_samples);
    cp.hamming = hamming_fraction(rasterize_partition(learned, st.g, cfg.resolution), true_part);
    cp.location_error.resize(facility.alternatives());
    for (Index k = 0; k < facility.alternatives(); ++k)
      cp.location_error[k] = (extract_location(st.beta_hat.beta.row(k).transpose()).location -
                              facility.locations.col(k))
                                 .norm();
    cp.Delta_max = max_coefficient_error(st.beta_hat, truth_model);
    cps.push_back(std::move(cp));
  });
  RunTrace trace =
      run_learner_with(state, FacilityObservation{facility}, horizon, Truth{truth_model, lin.g_star}, ro);
  return PartitionResult{std::move(state), std::move(trace), truth_model, lin.g_star,
                         dist.g_star,      true_part,        std::move(cps)};
}

void write_location_error_csv(std::ostream& out, const std::vector<PartitionCheckpoint>& cps) {
  out << "n,facility,error\r\n";
  for (const auto& cp : cps)
    for (Index k = 0; k < cp.location_error.size(); ++k)
      out << cp.n << ',' << k + 1 << ',' << format_double(cp.location_error[k]) << "\r\n";
}

}  // namespace semiot
