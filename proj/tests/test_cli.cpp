#include <gtest/gtest.h>

#include <algorithm>
#include <json.hpp>

#include "cli_runner.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ABCGOF_CLI;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() /
           ("abcgof_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const auto sim = cli::run(kCli, "simulate --model toy-gaussian --n 1500 --seed 3 --out '" +
                                        (dir_ / "sim").string() + "'");
    ASSERT_EQ(sim.exit_code, 0) << sim.err;
    fs::copy_file(dir_ / "sim" / "table.tsv", dir_ / "t.tsv");
    std::ofstream(dir_ / "o.tsv")
        << "stat_kurtosis\tstat_mean\tstat_variance\tstat_skewness\n3.2\t0.5\t1.4\t0.2\n";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) {
    return "'" + (dir_ / name).string() + "'";
  }
  static std::string inputs() {
    return "--table " + path("t.tsv") + " --observed " + path("o.tsv");
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, GfitPrintsGofResultJson) {
  const auto r = cli::run(kCli, "gfit " + inputs() + " --rate 0.01 --M 100 --seed 7");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "prior");
  EXPECT_EQ(j["M"], 100);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_TRUE(j["n_prime"].is_null());
  EXPECT_EQ(j["null_values"].size(), 100u);
  const double p = j["p_value"];
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
}

TEST_F(Cli, DefaultsFollowTheStatistic) {
  const auto prior = nlohmann::json::parse(cli::run(kCli, "gfit " + inputs()).out);
  EXPECT_EQ(prior["M"], 1000);
  EXPECT_EQ(prior["acceptance_rate"], 0.01);
  const auto post = cli::run(kCli, "gfit-post " + inputs() + " --model toy-gaussian --n-prime 5");
  ASSERT_EQ(post.exit_code, 0) << post.err;
  const auto j = nlohmann::json::parse(post.out);
  EXPECT_EQ(j["M"], 200);
  EXPECT_EQ(j["n_prime"], 5);
}

TEST_F(Cli, MissingTableIsUsageError) {
  const auto r = cli::run(kCli, "gfit --observed " + path("o.tsv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error[usage]:", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("Usage:"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, UnknownFlagAndModelAreUsageErrors) {
  EXPECT_EQ(cli::run(kCli, "gfit " + inputs() + " --bogus 1").exit_code, 1);
  const auto r = cli::run(kCli, "gfit-post " + inputs() + " --model nope");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error[usage]:", 0), 0u) << r.err;
  EXPECT_EQ(cli::run(kCli, "gfit " + inputs(), "ABCGOF_THREADS=zero").exit_code, 1);
}

TEST_F(Cli, DataErrorsExitTwo) {
  std::ofstream(dir_ / "bad.tsv") << "stat_mean\tstat_variance\n0.1\tNA\n";
  const auto bad = cli::run(kCli, "gfit --table " + path("t.tsv") + " --observed " +
                                      path("bad.tsv"));
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_EQ(bad.err.rfind("error[data]:", 0), 0u) << bad.err;
  EXPECT_NE(bad.err.find("NA"), std::string::npos);
  const auto missing = cli::run(kCli, "gfit --table " + path("absent.tsv") +
                                          " --observed " + path("o.tsv"));
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(std::count(missing.err.begin(), missing.err.end(), '\n'), 1);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  const std::string args = "gfit " + inputs() + " --M 200 --seed 11";
  EXPECT_EQ(cli::run(kCli, args + " --threads 1").out,
            cli::run(kCli, args + " --threads 4").out);
  EXPECT_EQ(cli::run(kCli, args).out, cli::run(kCli, args, "ABCGOF_THREADS=3").out);
}

TEST_F(Cli, OutDirectoryHoldsResultsAndManifest) {
  const auto r = cli::run(kCli, "ppc " + inputs() +
                                    " --model toy-gaussian --n-prime 50 --bins 5 --out " +
                                    path("ppc"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(fs::exists(dir_ / "ppc" / "ppc.json"));
  const auto tsv = cli::slurp(dir_ / "ppc" / "ppc_histograms.tsv");
  EXPECT_EQ(tsv.rfind("stat\tbin_lo\tbin_hi\tcount\n", 0), 0u);
  const auto manifest = nlohmann::json::parse(cli::slurp(dir_ / "ppc" / "manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "ppc");
  EXPECT_EQ(manifest["flags"]["n-prime"], 50);
  EXPECT_EQ(manifest["inputs"]["table"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_FALSE(manifest["flags"].contains("threads"));
}

TEST_F(Cli, ReplayReproducesOutputsAndChecksDigests) {
  ASSERT_EQ(cli::run(kCli, "gfitpca " + inputs() + " --coverage 0.8 --out " + path("pca"))
                .exit_code,
            0);
  const auto r = cli::run(kCli, "replay --manifest " + path("pca/manifest.json") +
                                    " --out " + path("pca2"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const auto* f : {"pca.json", "pca_scores.tsv", "pca_envelope.tsv", "manifest.json"}) {
    EXPECT_EQ(cli::slurp(dir_ / "pca" / f), cli::slurp(dir_ / "pca2" / f)) << f;
  }
  fs::copy_file(dir_ / "o.tsv", dir_ / "o_saved.tsv");
  std::ofstream(dir_ / "o.tsv")
      << "stat_kurtosis\tstat_mean\tstat_variance\tstat_skewness\n3.3\t0.5\t1.4\t0.2\n";
  const auto changed = cli::run(kCli, "replay --manifest " + path("pca/manifest.json"));
  EXPECT_EQ(changed.exit_code, 2);
  EXPECT_NE(changed.err.find("changed"), std::string::npos);
  fs::remove(dir_ / "o.tsv");
  fs::rename(dir_ / "o_saved.tsv", dir_ / "o.tsv");
}

TEST_F(Cli, StudyWritesJsonAndHistogram) {
  const auto r = cli::run(kCli,
                          "study power --null toy-gaussian --truth toy-laplace --n-sims 500 "
                          "--M 100 --datasets 30 --rate 0.05 --bins 4 --out " +
                              path("study"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(cli::slurp(dir_ / "study" / "study.json"));
  EXPECT_EQ(j["p_values"].size(), 30u);
  EXPECT_EQ(j["config"]["alt_model"], "toy-laplace");
  EXPECT_EQ(cli::slurp(dir_ / "study" / "pvalue_histogram.tsv").rfind("bin_lo\tbin_hi\tcount\n", 0),
            0u);
  EXPECT_EQ(cli::run(kCli, "study power --null toy-gaussian").exit_code, 1);
  EXPECT_EQ(cli::run(kCli, "study calibrate --null toy-gaussian --truth toy-laplace "
                           "--n-sims 100 --M 10 --datasets 2")
                .exit_code,
            1);
}

TEST_F(Cli, SimulateCoalescentTableLayout) {
  const auto r = cli::run(kCli, "simulate --model bottleneck --stats sfs --n 3 --seed 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto header = r.out.substr(0, r.out.find('\n'));
  EXPECT_EQ(header.rfind("param_theta\tparam_bottleneck_size", 0), 0u) << header;
  EXPECT_NE(header.find("stat_snps\tstat_sfs_1\t"), std::string::npos);
  EXPECT_NE(header.find("stat_sfs_19"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}
