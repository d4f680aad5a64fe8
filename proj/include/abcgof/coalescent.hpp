#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abcgof/simulator.hpp"

namespace abcgof {

// Time is measured in coalescent units: a pair of lineages in a population of
// relative size 1 coalesces at rate 1.

enum class DemographyLabel { constant, bottleneck, expansion };

const char* to_string(DemographyLabel label);
DemographyLabel parse_demography_label(const std::string& text);

struct Epoch {
  double start_time = 0.0;
  double relative_size = 1.0;
};

// Piecewise-constant population size history, present first.
class DemographyModel {
 public:
  DemographyModel(DemographyLabel label, std::vector<Epoch> epochs);

  static DemographyModel constant(double relative_size = 1.0);
  // Size drops to `size` over [start, start + duration), then back to 1.
  static DemographyModel bottleneck(double size, double start, double duration);
  // Size 1 from the present back to `time`, `ancestral_size` before it.
  static DemographyModel expansion(double ancestral_size, double time);

  DemographyLabel label() const { return label_; }
  const std::vector<Epoch>& epochs() const { return epochs_; }

 private:
  DemographyLabel label_;
  std::vector<Epoch> epochs_;
};

// Binary tree over n leaves (nodes 0..n-1) and n-1 internal nodes; the last
// node is the root.
struct Genealogy {
  int n_leaves = 0;
  std::vector<int> parent;        // -1 for the root
  std::vector<double> time;       // node ages; leaves are at 0
  std::vector<int> leaf_count;    // leaves below each node

  int root() const { return static_cast<int>(parent.size()) - 1; }
  double height() const { return time.back(); }
  double branch_length(int node) const;
  double total_length() const;
};

Genealogy simulate_genealogy(const DemographyModel& demography,
                             int n_chromosomes, Rng& rng);

struct BranchMutations {
  int node = 0;  // the branch above this node
  std::uint64_t count = 0;
};

// Infinite-sites mutations of one locus, stored as the number of sampled
// chromosomes carrying each derived allele.
struct LocusMutations {
  std::vector<int> derived_counts;
};

struct MutationDrop {
  std::vector<BranchMutations> branches;  // non-empty branches only
  LocusMutations locus;
};

// Poisson(theta / 2 * length) mutations on each branch (theta = 4 N mu per
// locus, as in ms); each is carried by the leaves below its branch.
MutationDrop drop_mutations(const Genealogy& tree, double theta, Rng& rng);

struct TajimaConstants {
  double a1, a2, b1, b2, c1, c2, e1, e2;
};
TajimaConstants tajima_constants(int n_chromosomes);

// Mean pairwise difference count.
double nucleotide_diversity(const LocusMutations& locus, int n_chromosomes);
// 0 for a monomorphic locus.
double tajimas_d(const LocusMutations& locus, int n_chromosomes);

// (mean pi, mean Tajima's D, variance of Tajima's D over loci, n-1 divisor).
std::array<double, 3> stats_pi_tajima(std::span<const LocusMutations> loci,
                                      int n_chromosomes);

struct SfsVector {
  std::vector<std::uint64_t> counts;  // entry i-1 counts alleles carried i times
  std::uint64_t total_snps = 0;
};
SfsVector site_frequency_spectrum(std::span<const LocusMutations> loci,
                                  int n_chromosomes);
// (total SNPs, sfs_1, ..., sfs_{n-1}) as reals.
std::vector<double> stats_sfs(std::span<const LocusMutations> loci,
                              int n_chromosomes);

enum class CoalescentStatSet { pi_tajima, sfs };

const char* to_string(CoalescentStatSet set);
CoalescentStatSet parse_stat_set(const std::string& text);

struct LocusConfig {
  int n_chromosomes = 20;  // 10 diploid individuals
  int n_loci = 50;
  int locus_length = 2000;  // bp; only informative, theta is per locus
};

LocusConfig default_locus_config(CoalescentStatSet set);

// Bounds of the uniform priors.
struct CoalescentPrior {
  double theta_lo = 1.0, theta_hi = 20.0;
  double bottleneck_size_lo = 0.02, bottleneck_size_hi = 0.5;
  double bottleneck_start_lo = 0.01, bottleneck_start_hi = 0.5;
  double bottleneck_duration_lo = 0.01, bottleneck_duration_hi = 0.5;
  double expansion_size_lo = 0.02, expansion_size_hi = 0.5;
  double expansion_time_lo = 0.01, expansion_time_hi = 0.5;
};

std::vector<std::string> coalescent_param_names(DemographyLabel label);

// theta first, then the demography parameters in param-name order.
std::vector<double> coalescent_draw_prior(DemographyLabel label, Rng& rng,
                                          const CoalescentPrior& prior = {});
DemographyModel demography_from_params(DemographyLabel label,
                                       std::span<const double> theta);

class CoalescentSimulator final : public Simulator {
 public:
  CoalescentSimulator(DemographyLabel label, CoalescentStatSet stat_set,
                      LocusConfig config, CoalescentPrior prior = {});
  CoalescentSimulator(DemographyLabel label, CoalescentStatSet stat_set)
      : CoalescentSimulator(label, stat_set, default_locus_config(stat_set)) {}

  std::string name() const override;
  const std::vector<std::string>& param_names() const override {
    return param_names_;
  }
  const std::vector<std::string>& stat_names() const override {
    return stat_names_;
  }
  std::vector<double> draw_prior(Rng& rng) const override;
  std::vector<double> simulate(std::span<const double> theta,
                               Rng& rng) const override;
  std::vector<ParamTransform> param_transforms() const override;

  // Mutations of every locus for one parameter vector.
  std::vector<LocusMutations> simulate_loci(std::span<const double> theta,
                                            Rng& rng) const;

  DemographyLabel label() const { return label_; }
  CoalescentStatSet stat_set() const { return stat_set_; }
  const LocusConfig& config() const { return config_; }

 private:
  DemographyLabel label_;
  CoalescentStatSet stat_set_;
  LocusConfig config_;
  CoalescentPrior prior_;
  std::vector<std::string> param_names_;
  std::vector<std::string> stat_names_;
};

}  // namespace abcgof
