#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "abcgof/core.hpp"
#include "abcgof/error.hpp"
#include "abcgof/gof.hpp"
#include "abcgof/harness.hpp"
#include "abcgof/json_io.hpp"
#include "abcgof/models.hpp"
#include "abcgof/pca.hpp"
#include "abcgof/ppc.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace abcgof;

namespace {

constexpr const char* kVersion = ABCGOF_VERSION;

// ---------------------------------------------------------------------------
// Flag bookkeeping. Every registered flag can report its resolved value, so
// a run can be written to a manifest and replayed from it.

// Output files of a run. The first artifact is the primary result and is
// what goes to stdout when no output directory is given.
struct Artifact {
  std::string file;
  std::function<void(std::ostream&)> write;
};

struct FlagRecord {
  std::string flag;
  std::function<std::optional<json>()> value;
};

struct Command {
  std::string name;  // "gfit", "study power", ...
  CLI::App* app = nullptr;
  std::vector<FlagRecord> flags;
  std::vector<std::string> input_flags;  // flags naming input files
  std::function<void()> resolve;         // fills context-dependent defaults
  std::function<std::vector<Artifact>()> run;
  std::optional<std::uint64_t>* seed = nullptr;
};

template <class T>
std::optional<json> resolved(const T& v) {
  return json(v);
}
std::optional<json> resolved(const std::string& v) {
  if (v.empty()) return std::nullopt;
  return json(v);
}
template <class T>
std::optional<json> resolved(const std::optional<T>& v) {
  if (!v) return std::nullopt;
  return json(*v);
}

template <class T>
CLI::Option* add_flag(Command& cmd, const std::string& flag, T& var,
                      const std::string& help) {
  cmd.flags.push_back({flag, [&var] { return resolved(var); }});
  return cmd.app->add_option(flag, var, help);
}

Artifact json_artifact(std::string file, json value) {
  return {std::move(file), [value = std::move(value)](std::ostream& out) {
            out << value.dump(2) << '\n';
          }};
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string flag_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

int default_threads() {
  if (const char* env = std::getenv("ABCGOF_THREADS")) {
    try {
      std::size_t used = 0;
      const int t = std::stoi(env, &used);
      if (used == std::string(env).size() && t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw usage_error(std::string("ABCGOF_THREADS must be a positive integer, got '") +
                      env + "'");
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------------------
// Subcommand state.

struct Common {
  int threads = 1;
  std::string out;
};

struct ModelFlags {
  std::string model;
  std::string stats = "pi-tajima";
  std::size_t sample_size = 50;

  ModelOptions options() const { return {stats, sample_size}; }
};

void add_model_flags(Command& cmd, ModelFlags& m, bool required) {
  auto* opt = add_flag(cmd, "--model", m.model,
                       "Built-in simulator: toy-gaussian, toy-laplace, "
                       "constant, bottleneck, expansion");
  if (required) opt->required();
  add_flag(cmd, "--stats", m.stats,
           "Coalescent statistic set: pi-tajima or sfs")
      ->capture_default_str();
  add_flag(cmd, "--sample-size", m.sample_size,
           "Observations per toy dataset")
      ->capture_default_str();
}

struct TableInput {
  std::string table;
  std::string observed;
};

void add_table_flags(Command& cmd, TableInput& in, bool observed) {
  add_flag(cmd, "--table", in.table, "Reference table TSV")->required();
  cmd.input_flags.push_back("--table");
  if (observed) {
    add_flag(cmd, "--observed", in.observed, "Observed statistics TSV")
        ->required();
    cmd.input_flags.push_back("--observed");
  }
}

struct GfitFlags {
  TableInput in;
  ModelFlags model;
  std::string stat = "prior";
  double rate = 0.01;
  std::optional<std::size_t> M;
  std::size_t n_prime = 100;
  std::optional<std::uint64_t> seed = 1;
};

struct PpcFlags {
  TableInput in;
  ModelFlags model;
  double rate = 0.01;
  std::size_t n_prime = 100;
  std::size_t bins = 20;
  std::optional<std::uint64_t> seed = 1;
};

struct PcaFlags {
  TableInput in;
  double coverage = 0.9;
};

struct SimulateFlags {
  ModelFlags model;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed = 1;
};

struct StudyFlags {
  std::string null_model;
  std::string truth;
  std::string stat = "prior";
  std::string stats = "pi-tajima";
  std::size_t sample_size = 50;
  std::size_t n_sims = 10000;
  double rate = 0.01;
  std::size_t M = 500;
  std::size_t n_prime = 100;
  std::size_t datasets = 500;
  double alpha = 0.05;
  std::size_t bins = 20;
  std::optional<std::uint64_t> seed = 1;
};

StatisticKind parse_stat(const std::string& s) {
  if (s == "prior") return StatisticKind::prior;
  if (s == "post") return StatisticKind::post;
  throw usage_error("--stat must be prior or post, got '" + s + "'");
}

std::vector<Artifact> ppc_artifacts(const Matrix& replicates,
                                    const ObservedStats& observed,
                                    std::size_t bins) {
  const auto report = ppc_report(replicates, observed);
  auto histograms = ppc_histogram_data(replicates, observed, bins);
  return {json_artifact("ppc.json", to_json(report)),
          {"ppc_histograms.tsv", [histograms](std::ostream& out) {
             write_histogram_tsv(out, histograms);
           }}};
}

std::vector<Artifact> run_gfit(GfitFlags& f, const Common& c) {
  const auto table = load_reference_table(f.in.table);
  const auto observed = load_observed(f.in.observed);
  if (parse_stat(f.stat) == StatisticKind::prior) {
    return {json_artifact("gfit.json", to_json(gfit(table, observed, f.rate,
                                                    *f.M, *f.seed, c.threads)))};
  }
  if (f.model.model.empty()) throw usage_error("--stat post needs --model");
  const auto sim = make_simulator(f.model.model, f.model.options());
  const auto outcome = gfit_post(table, observed, f.rate, *sim, f.n_prime,
                                 *f.M, *f.seed, c.threads);
  std::vector<Artifact> out{
      json_artifact("gfit_post.json", to_json(outcome.result))};
  // The observed data's replicates double as a posterior predictive check.
  auto ppc = ppc_artifacts(outcome.observed_replicates,
                           observed.aligned_to(table.stat_names()), 20);
  out.insert(out.end(), ppc.begin(), ppc.end());
  return out;
}

std::vector<Artifact> run_ppc(PpcFlags& f, const Common&) {
  const auto table = load_reference_table(f.in.table);
  const auto observed = load_observed(f.in.observed).aligned_to(table.stat_names());
  const auto sim = make_simulator(f.model.model, f.model.options());
  const auto scaling = fit_scaling(table);
  const auto post = d_post(table, observed, scaling, f.rate, *sim, f.n_prime,
                           *f.seed);
  return ppc_artifacts(post.replicates, observed, f.bins);
}

std::vector<Artifact> run_pca(PcaFlags& f, const Common&) {
  const auto table = load_reference_table(f.in.table);
  const auto observed = load_observed(f.in.observed).aligned_to(table.stat_names());
  const auto scaling = fit_scaling(table);
  auto projection = pca_fit(table, scaling);
  const auto score = projection.project(observed.values);
  auto env = envelope(projection.scores, score, f.coverage);
  auto scores = projection.scores;
  auto polygon = env.polygon;
  return {json_artifact("pca.json", to_json(projection, env, score)),
          {"pca_scores.tsv",
           [scores, score](std::ostream& out) { write_scores_tsv(out, scores, score); }},
          {"pca_envelope.tsv",
           [polygon](std::ostream& out) { write_polygon_tsv(out, polygon); }}};
}

std::vector<Artifact> run_simulate(SimulateFlags& f, const Common& c) {
  if (f.n < 1) throw usage_error("--n must be at least 1");
  const auto sim = make_simulator(f.model.model, f.model.options());
  auto table = std::make_shared<ReferenceTable>(
      simulate_reference_table(*sim, f.n, *f.seed, c.threads));
  return {{"table.tsv", [table](std::ostream& out) {
             write_reference_table(out, *table);
           }}};
}

std::vector<Artifact> run_study_cmd(StudyFlags& f, const Common& c,
                                    bool calibrate) {
  PowerStudyConfig config;
  config.null_model = f.null_model;
  config.alt_model = f.truth;
  config.model_options = {f.stats, f.sample_size};
  config.statistic = parse_stat(f.stat);
  config.n_sims = f.n_sims;
  config.acceptance_rate = f.rate;
  config.M = f.M;
  config.n_prime = f.n_prime;
  config.n_datasets = f.datasets;
  config.alpha = f.alpha;
  config.master_seed = *f.seed;
  const auto result = calibrate ? run_calibration(config, c.threads)
                                : run_power(config, c.threads);
  auto bins = emit_pvalue_histogram(result, f.bins);
  return {json_artifact("study.json", to_json(result)),
          {"pvalue_histogram.tsv", [bins](std::ostream& out) {
             write_pvalue_histogram_tsv(out, bins);
           }}};
}

// ---------------------------------------------------------------------------
// Output handling.

void write_outputs(const Command& cmd, const std::vector<Artifact>& artifacts,
                   const Common& c) {
  if (c.out.empty()) {
    artifacts.front().write(std::cout);
    std::cout.flush();
    return;
  }
  const fs::path dir(c.out);
  fs::create_directories(dir);
  json outputs = json::array();
  for (const auto& a : artifacts) {
    std::ofstream file(dir / a.file, std::ios::binary);
    if (!file) throw data_error("cannot write " + (dir / a.file).string());
    a.write(file);
    if (!file) throw data_error("failed writing " + (dir / a.file).string());
    outputs.push_back(a.file);
  }

  json manifest;
  manifest["tool"] = "abcgof";
  manifest["version"] = kVersion;
  manifest["subcommand"] = cmd.name;
  json flags = json::object();
  json argv = json::array();
  std::istringstream words(cmd.name);
  for (std::string w; words >> w;) argv.push_back(w);
  for (const auto& rec : cmd.flags) {
    const auto v = rec.value();
    if (!v) continue;
    flags[rec.flag.substr(2)] = *v;
    argv.push_back(rec.flag);
    argv.push_back(flag_text(*v));
  }
  manifest["flags"] = flags;
  manifest["seed"] = cmd.seed && *cmd.seed ? json(**cmd.seed) : json(nullptr);
  json inputs = json::object();
  for (const auto& rec : cmd.flags) {
    if (std::find(cmd.input_flags.begin(), cmd.input_flags.end(), rec.flag) ==
        cmd.input_flags.end()) {
      continue;
    }
    const auto path = rec.value()->get<std::string>();
    inputs[rec.flag.substr(2)] = {{"path", path}, {"sha256", sha256_file(path)}};
  }
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs;
  manifest["argv"] = argv;
  std::ofstream file(dir / "manifest.json", std::ios::binary);
  file << manifest.dump(2) << '\n';
  if (!file) throw data_error("failed writing manifest");
}

int report(const Error& e) {
  const bool usage = e.kind() == ErrorKind::usage;
  std::cerr << (usage ? "error[usage]: " : "error[data]: ") << e.what() << '\n';
  return usage ? 1 : 2;
}

// ---------------------------------------------------------------------------

int run(std::vector<std::string> args);

std::vector<std::string> replay_args(const std::string& manifest_path,
                                     const std::string& out) {
  std::ifstream in(manifest_path);
  if (!in) throw data_error("cannot open manifest " + manifest_path);
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const std::exception& e) {
    throw data_error(manifest_path + ": " + e.what());
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    throw data_error(manifest_path + ": no argv");
  }
  if (manifest.contains("inputs")) {
    for (const auto& [name, info] : manifest["inputs"].items()) {
      const auto path = info.at("path").get<std::string>();
      if (sha256_file(path) != info.at("sha256").get<std::string>()) {
        throw data_error("input '" + name + "' (" + path +
                         ") changed since the manifest was written");
      }
    }
  }
  std::vector<std::string> args;
  for (const auto& a : manifest["argv"]) args.push_back(a.get<std::string>());
  if (!out.empty()) {
    args.push_back("--out");
    args.push_back(out);
  }
  return args;
}

int run(std::vector<std::string> args) {
  CLI::App app{
      "Goodness-of-fit tests for approximate Bayesian computation.\n"
      "Results go to stdout, or with --out to files plus a manifest.json."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  std::optional<int> threads_flag;
  auto add_common = [&](Command& cmd) {
    cmd.app->add_option("--threads", threads_flag,
                        "Worker threads (default: ABCGOF_THREADS or all cores)");
    cmd.app->add_option("--out", common.out,
                        "Output directory; writes result files and manifest.json");
  };

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](CLI::App* parent, const std::string& sub,
                  const std::string& full, const std::string& help) {
    auto cmd = std::make_unique<Command>();
    cmd->name = full;
    cmd->app = parent->add_subcommand(sub, help);
    add_common(*cmd);
    commands.push_back(std::move(cmd));
    return commands.back().get();
  };

  // simulate
  SimulateFlags sim_f;
  {
    auto* cmd = make(&app, "simulate", "simulate",
                     "Simulate a reference table from a built-in model");
    add_model_flags(*cmd, sim_f.model, true);
    add_flag(*cmd, "--n", sim_f.n, "Number of simulations")->required();
    add_flag(*cmd, "--seed", sim_f.seed, "Seed")->capture_default_str();
    cmd->seed = &sim_f.seed;
    cmd->run = [&] { return run_simulate(sim_f, common); };
  }

  // gfit, gfit-post
  GfitFlags gfit_f, post_f;
  post_f.stat = "post";
  for (auto [sub, f] : {std::pair<const char*, GfitFlags*>{"gfit", &gfit_f},
                        {"gfit-post", &post_f}}) {
    const bool post_only = std::string(sub) == "gfit-post";
    auto* cmd = make(&app, sub, sub,
                     post_only ? "D_post test (posterior predictive)"
                               : "D_prior test, or D_post with --stat post");
    add_table_flags(*cmd, f->in, true);
    if (!post_only) {
      add_flag(*cmd, "--stat", f->stat, "prior or post")->capture_default_str();
    }
    add_model_flags(*cmd, f->model, post_only);
    add_flag(*cmd, "--rate", f->rate, "Acceptance rate")->capture_default_str();
    add_flag(*cmd, "--M", f->M,
             "Pseudo-observed replicates (default 1000 prior, 200 post)");
    add_flag(*cmd, "--n-prime", f->n_prime, "Posterior replicates per dataset")
        ->capture_default_str();
    add_flag(*cmd, "--seed", f->seed, "Seed")->capture_default_str();
    cmd->seed = &f->seed;
    cmd->resolve = [f] {
      const bool post = parse_stat(f->stat) == StatisticKind::post;
      if (!f->M) f->M = post ? 200 : 1000;
      if (!post) f->model = ModelFlags{};
    };
    cmd->run = [f, &common] { return run_gfit(*f, common); };
  }

  // ppc
  PpcFlags ppc_f;
  {
    auto* cmd = make(&app, "ppc", "ppc",
                     "Posterior predictive check of each statistic");
    add_table_flags(*cmd, ppc_f.in, true);
    add_model_flags(*cmd, ppc_f.model, true);
    add_flag(*cmd, "--rate", ppc_f.rate, "Acceptance rate")->capture_default_str();
    add_flag(*cmd, "--n-prime", ppc_f.n_prime, "Posterior replicates")
        ->capture_default_str();
    add_flag(*cmd, "--bins", ppc_f.bins, "Histogram bins")->capture_default_str();
    add_flag(*cmd, "--seed", ppc_f.seed, "Seed")->capture_default_str();
    cmd->seed = &ppc_f.seed;
    cmd->run = [&] { return run_ppc(ppc_f, common); };
  }

  // gfitpca
  PcaFlags pca_f;
  {
    auto* cmd = make(&app, "gfitpca", "gfitpca",
                     "Project simulations on two principal components with an "
                     "envelope around them");
    add_table_flags(*cmd, pca_f.in, true);
    add_flag(*cmd, "--coverage", pca_f.coverage, "Envelope coverage in (0, 1)")
        ->capture_default_str();
    cmd->run = [&] { return run_pca(pca_f, common); };
  }

  // study calibrate | power
  StudyFlags study_f;
  auto* study = app.add_subcommand("study", "Type I error and power studies");
  study->require_subcommand(1);
  for (const char* mode : {"calibrate", "power"}) {
    const bool calibrate = std::string(mode) == "calibrate";
    auto* cmd = make(study, mode, std::string("study ") + mode,
                     calibrate ? "P-value calibration under a true null"
                               : "Power against a different true model");
    add_flag(*cmd, "--null", study_f.null_model, "Null model")->required();
    auto* truth = add_flag(*cmd, "--truth", study_f.truth,
                           "Model generating the datasets");
    if (!calibrate) truth->required();
    add_flag(*cmd, "--stat", study_f.stat, "prior or post")->capture_default_str();
    add_flag(*cmd, "--stats", study_f.stats, "Coalescent statistic set")
        ->capture_default_str();
    add_flag(*cmd, "--sample-size", study_f.sample_size, "Toy sample size")
        ->capture_default_str();
    add_flag(*cmd, "--n-sims", study_f.n_sims, "Reference table size")
        ->capture_default_str();
    add_flag(*cmd, "--rate", study_f.rate, "Acceptance rate")->capture_default_str();
    add_flag(*cmd, "--M", study_f.M, "Pseudo-observed replicates per dataset")
        ->capture_default_str();
    add_flag(*cmd, "--n-prime", study_f.n_prime, "Posterior replicates")
        ->capture_default_str();
    add_flag(*cmd, "--datasets", study_f.datasets, "Number of test datasets")
        ->capture_default_str();
    add_flag(*cmd, "--alpha", study_f.alpha, "Test level")->capture_default_str();
    add_flag(*cmd, "--bins", study_f.bins, "P-value histogram bins")
        ->capture_default_str();
    add_flag(*cmd, "--seed", study_f.seed, "Master seed")->capture_default_str();
    cmd->seed = &study_f.seed;
    cmd->resolve = [calibrate, &study_f] {
      if (calibrate && study_f.truth.empty()) study_f.truth = study_f.null_model;
    };
    cmd->run = [calibrate, &study_f, &common] {
      return run_study_cmd(study_f, common, calibrate);
    };
  }

  // replay
  std::string manifest_path;
  std::string replay_out;
  auto* replay = app.add_subcommand(
      "replay", "Re-run a recorded invocation after checking input digests");
  replay->add_option("--manifest", manifest_path, "manifest.json of a previous run")
      ->required();
  replay->add_option("--out", replay_out, "Output directory (default: stdout)");
  replay->add_option("--threads", threads_flag, "Worker threads");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    const CLI::App* failing = &app;
    for (const auto* sub = &app; sub;) {
      const auto subs = sub->get_subcommands();
      sub = subs.empty() ? nullptr : subs.front();
      if (sub) failing = sub;
    }
    std::cerr << failing->help();
    return 1;
  }

  try {
    if (replay->parsed()) {
      auto next = replay_args(manifest_path, replay_out);
      if (threads_flag) {
        next.push_back("--threads");
        next.push_back(std::to_string(*threads_flag));
      }
      return run(std::move(next));
    }
    if (threads_flag && *threads_flag < 1) {
      throw usage_error("--threads must be at least 1");
    }
    common.threads = threads_flag ? *threads_flag : default_threads();
    for (const auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      if (cmd->resolve) cmd->resolve();
      // Record input paths absolutely so a manifest replays from anywhere.
      if (!common.out.empty()) {
        for (auto* in : {&gfit_f.in, &post_f.in, &ppc_f.in, &pca_f.in}) {
          for (auto* p : {&in->table, &in->observed}) {
            if (!p->empty()) *p = fs::absolute(*p).lexically_normal().string();
          }
        }
      }
      const auto artifacts = cmd->run();
      write_outputs(*cmd, artifacts, common);
      return 0;
    }
    std::cerr << "error[usage]: no subcommand\n" << app.help();
    return 1;
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error[data]: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
