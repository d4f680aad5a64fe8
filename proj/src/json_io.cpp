#include "abcgof/json_io.hpp"

namespace abcgof {

using nlohmann::ordered_json;

ordered_json to_json(const GofResult& result) {
  ordered_json j;
  j["kind"] = to_string(result.kind);
  j["observed_D"] = result.observed_value;
  j["p_value"] = result.p_value;
  j["p_value_conservative"] = result.p_value_conservative();
  j["M"] = result.settings.M;
  j["acceptance_rate"] = result.settings.acceptance_rate;
  if (result.settings.n_prime) {
    j["n_prime"] = *result.settings.n_prime;
  } else {
    j["n_prime"] = nullptr;
  }
  j["seed"] = result.settings.seed;
  j["null_values"] = result.null_values;
  return j;
}

ordered_json to_json(const PpcReport& report) {
  ordered_json stats = ordered_json::array();
  for (const auto& c : report.per_stat) {
    ordered_json s;
    s["stat"] = c.stat_name;
    s["observed"] = c.observed;
    s["lower_tail"] = c.lower_tail;
    s["upper_tail"] = c.upper_tail;
    s["two_sided"] = c.two_sided;
    s["outside_range"] = c.outside_range;
    s["n_replicates"] = c.replicates.size();
    stats.push_back(std::move(s));
  }
  ordered_json j;
  j["statistics"] = std::move(stats);
  return j;
}

namespace {

ordered_json point(const Point2& p) { return ordered_json::array({p[0], p[1]}); }

}  // namespace

ordered_json to_json(const PcaProjection& projection, const Envelope& envelope,
                     const Point2& observed_score) {
  ordered_json j;
  j["usable_statistics"] = projection.usable;
  ordered_json mean = ordered_json::array();
  for (Eigen::Index i = 0; i < projection.mean.size(); ++i) {
    mean.push_back(projection.mean[i]);
  }
  j["mean"] = std::move(mean);
  ordered_json loadings = ordered_json::array();
  for (Eigen::Index i = 0; i < projection.loadings.rows(); ++i) {
    loadings.push_back({projection.loadings(i, 0), projection.loadings(i, 1)});
  }
  j["loadings"] = std::move(loadings);
  j["explained_fraction"] = {projection.explained_fraction[0],
                             projection.explained_fraction[1]};
  j["observed_score"] = point(observed_score);
  j["coverage"] = envelope.coverage;
  ordered_json polygon = ordered_json::array();
  for (const auto& p : envelope.polygon) polygon.push_back(point(p));
  j["envelope"] = std::move(polygon);
  j["contains_observed"] = envelope.contains_observed;
  return j;
}

ordered_json to_json(const PowerStudyConfig& config) {
  ordered_json j;
  j["null_model"] = config.null_model;
  j["alt_model"] = config.alt_model;
  j["stats"] = config.model_options.stat_set;
  j["sample_size"] = config.model_options.sample_size;
  j["statistic"] = to_string(config.statistic);
  j["n_sims"] = config.n_sims;
  j["acceptance_rate"] = config.acceptance_rate;
  j["M"] = config.M;
  if (config.statistic == StatisticKind::post) {
    j["n_prime"] = config.n_prime;
  } else {
    j["n_prime"] = nullptr;
  }
  j["n_datasets"] = config.n_datasets;
  j["alpha"] = config.alpha;
  j["master_seed"] = config.master_seed;
  return j;
}

ordered_json to_json(const PowerStudyResult& result) {
  ordered_json j;
  j["config"] = to_json(result.config);
  j["rejections"] = result.rejections;
  j["rejection_rate"] = result.rejection_rate;
  j["ks_statistic"] = result.ks_statistic;
  j["ks_uniformity_p"] = result.ks_uniformity_p;
  j["p_values"] = result.p_values;
  return j;
}

}  // namespace abcgof
