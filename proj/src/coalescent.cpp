#include "abcgof/coalescent.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "abcgof/error.hpp"

namespace abcgof {

const char* to_string(DemographyLabel label) {
  switch (label) {
    case DemographyLabel::constant: return "constant";
    case DemographyLabel::bottleneck: return "bottleneck";
    case DemographyLabel::expansion: return "expansion";
  }
  return "?";
}

DemographyLabel parse_demography_label(const std::string& text) {
  if (text == "constant") return DemographyLabel::constant;
  if (text == "bottleneck") return DemographyLabel::bottleneck;
  if (text == "expansion") return DemographyLabel::expansion;
  throw usage_error("unknown demography '" + text + "'");
}

const char* to_string(CoalescentStatSet set) {
  return set == CoalescentStatSet::pi_tajima ? "pi-tajima" : "sfs";
}

CoalescentStatSet parse_stat_set(const std::string& text) {
  if (text == "pi-tajima") return CoalescentStatSet::pi_tajima;
  if (text == "sfs") return CoalescentStatSet::sfs;
  throw usage_error("unknown statistic set '" + text +
                    "' (expected pi-tajima or sfs)");
}

DemographyModel::DemographyModel(DemographyLabel label, std::vector<Epoch> epochs)
    : label_(label), epochs_(std::move(epochs)) {
  if (epochs_.empty() || epochs_.front().start_time != 0.0) {
    throw data_error("demography: the first epoch must start at time 0");
  }
  for (std::size_t i = 0; i < epochs_.size(); ++i) {
    const auto& e = epochs_[i];
    if (!(e.relative_size > 0.0) || !std::isfinite(e.relative_size)) {
      throw data_error("demography: epoch sizes must be positive and finite");
    }
    if (i > 0 && !(e.start_time > epochs_[i - 1].start_time &&
                   std::isfinite(e.start_time))) {
      throw data_error("demography: epoch start times must increase");
    }
  }
  switch (label_) {
    case DemographyLabel::constant:
      break;
    case DemographyLabel::bottleneck: {
      bool has_drop = false;
      for (std::size_t i = 1; i + 1 < epochs_.size(); ++i) {
        has_drop = has_drop || epochs_[i].relative_size < 1.0;
      }
      if (!has_drop) {
        throw data_error("demography: a bottleneck needs an intermediate epoch "
                         "with relative size below 1");
      }
      break;
    }
    case DemographyLabel::expansion:
      if (!(epochs_.front().relative_size > epochs_.back().relative_size)) {
        throw data_error("demography: an expansion needs a present size above "
                         "the ancestral size");
      }
      break;
  }
}

DemographyModel DemographyModel::constant(double relative_size) {
  return {DemographyLabel::constant, {{0.0, relative_size}}};
}

DemographyModel DemographyModel::bottleneck(double size, double start,
                                            double duration) {
  if (!(start > 0.0) || !(duration > 0.0)) {
    throw data_error("demography: bottleneck start and duration must be > 0");
  }
  return {DemographyLabel::bottleneck,
          {{0.0, 1.0}, {start, size}, {start + duration, 1.0}}};
}

DemographyModel DemographyModel::expansion(double ancestral_size, double time) {
  if (!(time > 0.0)) throw data_error("demography: expansion time must be > 0");
  return {DemographyLabel::expansion, {{0.0, 1.0}, {time, ancestral_size}}};
}

double Genealogy::branch_length(int node) const {
  const int p = parent[static_cast<std::size_t>(node)];
  return p < 0 ? 0.0
               : time[static_cast<std::size_t>(p)] -
                     time[static_cast<std::size_t>(node)];
}

double Genealogy::total_length() const {
  double total = 0.0;
  for (int v = 0; v < root(); ++v) total += branch_length(v);
  return total;
}

namespace {

void fill_genealogy(const DemographyModel& demography, int n, Rng& rng,
                    Genealogy& tree, std::vector<int>& active) {
  const auto nodes = static_cast<std::size_t>(2 * n - 1);
  tree.n_leaves = n;
  tree.parent.assign(nodes, -1);
  tree.time.assign(nodes, 0.0);
  tree.leaf_count.assign(nodes, 0);
  active.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    active[static_cast<std::size_t>(i)] = i;
    tree.leaf_count[static_cast<std::size_t>(i)] = 1;
  }

  const auto& epochs = demography.epochs();
  std::size_t epoch = 0;
  double t = 0.0;
  int next = n;
  while (active.size() > 1) {
    const auto j = static_cast<double>(active.size());
    // Waiting time in units of a size-1 population, then stretched by each
    // epoch's size until it is used up.
    double w = rng.exponential() / (j * (j - 1.0) / 2.0);
    for (;;) {
      const double size = epochs[epoch].relative_size;
      const double end = epoch + 1 < epochs.size()
                             ? epochs[epoch + 1].start_time
                             : std::numeric_limits<double>::infinity();
      const double dt = w * size;
      if (t + dt < end) {
        t += dt;
        break;
      }
      w -= (end - t) / size;
      t = end;
      ++epoch;
    }
    const auto a = rng.uniform_index(active.size());
    auto b = rng.uniform_index(active.size() - 1);
    if (b >= a) ++b;
    const auto node = static_cast<std::size_t>(next);
    const int ca = active[a];
    const int cb = active[b];
    tree.parent[static_cast<std::size_t>(ca)] = next;
    tree.parent[static_cast<std::size_t>(cb)] = next;
    tree.time[node] = t;
    tree.leaf_count[node] = tree.leaf_count[static_cast<std::size_t>(ca)] +
                            tree.leaf_count[static_cast<std::size_t>(cb)];
    active[a] = next;
    active[b] = active.back();
    active.pop_back();
    ++next;
  }
}

void check_chromosomes(int n) {
  if (n < 2) throw usage_error("coalescent: need at least 2 chromosomes");
}

void drop_into(const Genealogy& tree, double theta, Rng& rng,
               LocusMutations& locus, std::vector<BranchMutations>* branches) {
  locus.derived_counts.clear();
  const double rate = theta / 2.0;
  for (int v = 0; v < tree.root(); ++v) {
    const auto count = rng.poisson(rate * tree.branch_length(v));
    if (count == 0) continue;
    if (branches) branches->push_back({v, count});
    locus.derived_counts.insert(locus.derived_counts.end(), count,
                                tree.leaf_count[static_cast<std::size_t>(v)]);
  }
}

}  // namespace

Genealogy simulate_genealogy(const DemographyModel& demography,
                             int n_chromosomes, Rng& rng) {
  check_chromosomes(n_chromosomes);
  Genealogy tree;
  std::vector<int> active;
  fill_genealogy(demography, n_chromosomes, rng, tree, active);
  return tree;
}

MutationDrop drop_mutations(const Genealogy& tree, double theta, Rng& rng) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw usage_error("drop_mutations: theta must be finite and >= 0");
  }
  MutationDrop drop;
  drop_into(tree, theta, rng, drop.locus, &drop.branches);
  return drop;
}

TajimaConstants tajima_constants(int n_chromosomes) {
  check_chromosomes(n_chromosomes);
  const auto n = static_cast<double>(n_chromosomes);
  double a1 = 0.0, a2 = 0.0;
  for (int i = 1; i < n_chromosomes; ++i) {
    a1 += 1.0 / i;
    a2 += 1.0 / (static_cast<double>(i) * i);
  }
  const double b1 = (n + 1.0) / (3.0 * (n - 1.0));
  const double b2 = 2.0 * (n * n + n + 3.0) / (9.0 * n * (n - 1.0));
  const double c1 = b1 - 1.0 / a1;
  const double c2 = b2 - (n + 2.0) / (a1 * n) + a2 / (a1 * a1);
  return {a1, a2, b1, b2, c1, c2, c1 / a1, c2 / (a1 * a1 + a2)};
}

double nucleotide_diversity(const LocusMutations& locus, int n_chromosomes) {
  check_chromosomes(n_chromosomes);
  const auto n = static_cast<double>(n_chromosomes);
  double sum = 0.0;
  for (int c : locus.derived_counts) {
    sum += static_cast<double>(c) * (n - static_cast<double>(c));
  }
  return sum / (n * (n - 1.0) / 2.0);
}

namespace {

double tajimas_d_with(const LocusMutations& locus, int n,
                      const TajimaConstants& k) {
  const auto s = static_cast<double>(locus.derived_counts.size());
  if (s == 0.0) return 0.0;
  const double pi = nucleotide_diversity(locus, n);
  const double var = k.e1 * s + k.e2 * s * (s - 1.0);
  // With two or three chromosomes pi equals S / a1 identically and the
  // variance vanishes.
  if (!(var > 0.0)) return 0.0;
  return (pi - s / k.a1) / std::sqrt(var);
}

}  // namespace

double tajimas_d(const LocusMutations& locus, int n_chromosomes) {
  return tajimas_d_with(locus, n_chromosomes, tajima_constants(n_chromosomes));
}

std::array<double, 3> stats_pi_tajima(std::span<const LocusMutations> loci,
                                      int n_chromosomes) {
  if (loci.size() < 2) throw usage_error("stats_pi_tajima: need 2+ loci");
  const auto k = tajima_constants(n_chromosomes);
  const auto m = static_cast<double>(loci.size());
  double pi_sum = 0.0;
  std::vector<double> d(loci.size());
  for (std::size_t i = 0; i < loci.size(); ++i) {
    pi_sum += nucleotide_diversity(loci[i], n_chromosomes);
    d[i] = tajimas_d_with(loci[i], n_chromosomes, k);
  }
  double d_mean = 0.0;
  for (double x : d) d_mean += x;
  d_mean /= m;
  double ss = 0.0;
  for (double x : d) ss += (x - d_mean) * (x - d_mean);
  return {pi_sum / m, d_mean, ss / (m - 1.0)};
}

SfsVector site_frequency_spectrum(std::span<const LocusMutations> loci,
                                  int n_chromosomes) {
  check_chromosomes(n_chromosomes);
  SfsVector sfs;
  sfs.counts.assign(static_cast<std::size_t>(n_chromosomes - 1), 0);
  for (const auto& locus : loci) {
    for (int c : locus.derived_counts) {
      if (c < 1 || c >= n_chromosomes) {
        throw data_error("site_frequency_spectrum: derived count out of range");
      }
      ++sfs.counts[static_cast<std::size_t>(c - 1)];
      ++sfs.total_snps;
    }
  }
  return sfs;
}

std::vector<double> stats_sfs(std::span<const LocusMutations> loci,
                              int n_chromosomes) {
  const auto sfs = site_frequency_spectrum(loci, n_chromosomes);
  std::vector<double> out;
  out.reserve(sfs.counts.size() + 1);
  out.push_back(static_cast<double>(sfs.total_snps));
  for (auto c : sfs.counts) out.push_back(static_cast<double>(c));
  return out;
}

LocusConfig default_locus_config(CoalescentStatSet set) {
  LocusConfig config;
  config.n_loci = set == CoalescentStatSet::pi_tajima ? 50 : 100;
  return config;
}

std::vector<std::string> coalescent_param_names(DemographyLabel label) {
  switch (label) {
    case DemographyLabel::constant:
      return {"theta"};
    case DemographyLabel::bottleneck:
      return {"theta", "bottleneck_size", "bottleneck_start",
              "bottleneck_duration"};
    case DemographyLabel::expansion:
      return {"theta", "ancestral_size", "expansion_time"};
  }
  return {};
}

std::vector<double> coalescent_draw_prior(DemographyLabel label, Rng& rng,
                                          const CoalescentPrior& prior) {
  std::vector<double> theta{rng.uniform(prior.theta_lo, prior.theta_hi)};
  switch (label) {
    case DemographyLabel::constant:
      break;
    case DemographyLabel::bottleneck:
      theta.push_back(
          rng.uniform(prior.bottleneck_size_lo, prior.bottleneck_size_hi));
      theta.push_back(
          rng.uniform(prior.bottleneck_start_lo, prior.bottleneck_start_hi));
      theta.push_back(rng.uniform(prior.bottleneck_duration_lo,
                                  prior.bottleneck_duration_hi));
      break;
    case DemographyLabel::expansion:
      theta.push_back(
          rng.uniform(prior.expansion_size_lo, prior.expansion_size_hi));
      theta.push_back(
          rng.uniform(prior.expansion_time_lo, prior.expansion_time_hi));
      break;
  }
  return theta;
}

DemographyModel demography_from_params(DemographyLabel label,
                                       std::span<const double> theta) {
  const auto expected = coalescent_param_names(label).size();
  if (theta.size() != expected) {
    throw usage_error("demography: expected " + std::to_string(expected) +
                      " parameters");
  }
  switch (label) {
    case DemographyLabel::constant:
      return DemographyModel::constant();
    case DemographyLabel::bottleneck:
      return DemographyModel::bottleneck(theta[1], theta[2], theta[3]);
    case DemographyLabel::expansion:
      return DemographyModel::expansion(theta[1], theta[2]);
  }
  throw usage_error("demography: unknown label");
}

CoalescentSimulator::CoalescentSimulator(DemographyLabel label,
                                         CoalescentStatSet stat_set,
                                         LocusConfig config,
                                         CoalescentPrior prior)
    : label_(label),
      stat_set_(stat_set),
      config_(config),
      prior_(prior),
      param_names_(coalescent_param_names(label)) {
  check_chromosomes(config_.n_chromosomes);
  if (config_.n_loci < 1 || config_.locus_length < 1) {
    throw usage_error("coalescent: loci count and length must be positive");
  }
  if (stat_set_ == CoalescentStatSet::pi_tajima) {
    if (config_.n_loci < 2) {
      throw usage_error("coalescent: the pi-tajima set needs 2+ loci");
    }
    stat_names_ = {"pi", "tajima_d_mean", "tajima_d_var"};
  } else {
    stat_names_ = {"snps"};
    for (int i = 1; i < config_.n_chromosomes; ++i) {
      stat_names_.push_back("sfs_" + std::to_string(i));
    }
  }
}

std::string CoalescentSimulator::name() const {
  return std::string(to_string(label_)) + "/" + to_string(stat_set_);
}

std::vector<double> CoalescentSimulator::draw_prior(Rng& rng) const {
  return coalescent_draw_prior(label_, rng, prior_);
}

std::vector<ParamTransform> CoalescentSimulator::param_transforms() const {
  std::vector<ParamTransform> t{
      ParamTransform::bounded(prior_.theta_lo, prior_.theta_hi)};
  switch (label_) {
    case DemographyLabel::constant:
      break;
    case DemographyLabel::bottleneck:
      t.push_back(ParamTransform::bounded(prior_.bottleneck_size_lo,
                                          prior_.bottleneck_size_hi));
      t.push_back(ParamTransform::bounded(prior_.bottleneck_start_lo,
                                          prior_.bottleneck_start_hi));
      t.push_back(ParamTransform::bounded(prior_.bottleneck_duration_lo,
                                          prior_.bottleneck_duration_hi));
      break;
    case DemographyLabel::expansion:
      t.push_back(ParamTransform::bounded(prior_.expansion_size_lo,
                                          prior_.expansion_size_hi));
      t.push_back(ParamTransform::bounded(prior_.expansion_time_lo,
                                          prior_.expansion_time_hi));
      break;
  }
  return t;
}

std::vector<LocusMutations> CoalescentSimulator::simulate_loci(
    std::span<const double> theta, Rng& rng) const {
  std::vector<double> draw(theta.begin(), theta.end());
  const auto fail = [&](const std::string& why) {
    return SimulationError(name() + ": " + why, draw);
  };
  if (theta.size() != param_names_.size()) throw fail("wrong parameter count");
  if (!(theta[0] >= 0.0) || !std::isfinite(theta[0])) {
    throw fail("theta must be finite and >= 0");
  }
  std::optional<DemographyModel> demography;
  try {
    demography.emplace(demography_from_params(label_, theta));
  } catch (const Error& e) {
    throw fail(e.what());
  }

  const double mutation_theta =
      theta[0] / demography->epochs().back().relative_size;
  std::vector<LocusMutations> loci(static_cast<std::size_t>(config_.n_loci));
  Genealogy tree;
  std::vector<int> active;
  for (auto& locus : loci) {
    fill_genealogy(*demography, config_.n_chromosomes, rng, tree, active);
    drop_into(tree, mutation_theta, rng, locus, nullptr);
  }
  return loci;
}

std::vector<double> CoalescentSimulator::simulate(std::span<const double> theta,
                                                  Rng& rng) const {
  const auto loci = simulate_loci(theta, rng);
  if (stat_set_ == CoalescentStatSet::pi_tajima) {
    const auto s = stats_pi_tajima(loci, config_.n_chromosomes);
    return {s[0], s[1], s[2]};
  }
  return stats_sfs(loci, config_.n_chromosomes);
}

}  // namespace abcgof
