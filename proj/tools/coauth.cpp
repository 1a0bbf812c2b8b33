// coauth - gender-aware co-authorship network analysis pipeline.
//
// `coauth run` executes every stage end to end; the per-stage subcommands
// re-run a single stage against the persisted intermediate files in the
// output directory.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coauth/fixture.hpp"
#include "coauth/pipeline.hpp"

namespace {

struct CliOptions {
  coauth::RunConfig config;
  std::string config_file;
  std::string format = "jsonl";
  bool ci_mode = false;
  bool seed_given = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_file, "JSON config file; flags override its values");
  cmd->add_option("--corpus", opts.config.corpus_path, "publication metadata (JSONL or CSV)");
  cmd->add_option("--lexicon", opts.config.lexicon_path, "gender lexicon CSV (name,gender)");
  cmd->add_option("--stopwords", opts.config.stopwords_path,
                  "stop-word file, one token per line (default: built-in list)");
  cmd->add_option("--format", opts.format, "corpus format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_option("--out", opts.config.out_dir, "output directory");
  cmd->add_option("--topics,-K", opts.config.num_topics, "number of LDA topics");
  cmd->add_option("--alpha", opts.config.alpha, "document-topic prior (default 50/K)");
  cmd->add_option("--beta", opts.config.beta, "topic-word prior");
  cmd->add_option("--iterations", opts.config.iterations, "Gibbs sweeps");
  cmd->add_option("--min-df", opts.config.min_df, "vocabulary document-frequency floor");
  cmd->add_option("--select-k", opts.config.k_candidates,
                  "candidate topic counts for the model-selection sweep");
  cmd->add_option("--tau", opts.config.tau, "active-field threshold");
  cmd->add_option("--core-fraction", opts.config.core_fraction, "core share of nodes");
  cmd->add_option("--top-fraction", opts.config.top_fraction, "top subnetwork share");
  cmd->add_option("--permutations", opts.config.permutations, "permutation test rounds");
  cmd->add_option("--year-min", opts.config.year_min, "inclusive year window start");
  cmd->add_option("--year-max", opts.config.year_max, "inclusive year window end");
  cmd->add_option("--confidence", opts.config.confidence, "Cochran confidence level");
  cmd->add_option("--margin", opts.config.margin, "Cochran margin of error");
  cmd->add_flag("--stratified-null", opts.config.stratified_null,
                "sample null teams within each gender class");
  cmd->add_flag("!--no-unknown-in-size", opts.config.count_unknown_in_size,
                "exclude unknown-gender authors from team size |p|");
  cmd->add_option("--exact-bc-threshold", opts.config.exact_bc_threshold,
                  "node count above which betweenness is sampled");
  cmd->add_option("--bc-sources", opts.config.bc_sources, "sampled betweenness sources");
  cmd->add_option("--threads", opts.config.threads, "worker thread cap");
  cmd->add_option("--seed", opts.config.seed, "RNG seed")->each([&](const std::string&) {
    opts.seed_given = true;
  });
  cmd->add_flag("--ci", opts.ci_mode, "CI mode: --seed becomes mandatory");
}

coauth::RunConfig resolve_config(CLI::App* cmd, CliOptions& opts) {
  coauth::RunConfig config;
  if (!opts.config_file.empty()) config = coauth::RunConfig::from_json_file(opts.config_file);
  // CLI flags that were actually given take precedence over the file.
  const auto take = [&](const char* flag, auto member) {
    if (cmd->count(flag) > 0) config.*member = opts.config.*member;
  };
  take("--corpus", &coauth::RunConfig::corpus_path);
  take("--lexicon", &coauth::RunConfig::lexicon_path);
  take("--stopwords", &coauth::RunConfig::stopwords_path);
  take("--out", &coauth::RunConfig::out_dir);
  take("--topics", &coauth::RunConfig::num_topics);
  take("--alpha", &coauth::RunConfig::alpha);
  take("--beta", &coauth::RunConfig::beta);
  take("--iterations", &coauth::RunConfig::iterations);
  take("--min-df", &coauth::RunConfig::min_df);
  take("--select-k", &coauth::RunConfig::k_candidates);
  take("--tau", &coauth::RunConfig::tau);
  take("--core-fraction", &coauth::RunConfig::core_fraction);
  take("--top-fraction", &coauth::RunConfig::top_fraction);
  take("--permutations", &coauth::RunConfig::permutations);
  take("--year-min", &coauth::RunConfig::year_min);
  take("--year-max", &coauth::RunConfig::year_max);
  take("--confidence", &coauth::RunConfig::confidence);
  take("--margin", &coauth::RunConfig::margin);
  take("--exact-bc-threshold", &coauth::RunConfig::exact_bc_threshold);
  take("--bc-sources", &coauth::RunConfig::bc_sources);
  take("--threads", &coauth::RunConfig::threads);
  take("--seed", &coauth::RunConfig::seed);
  if (cmd->count("--format") > 0)
    config.corpus_format =
        opts.format == "csv" ? coauth::CorpusFormat::csv : coauth::CorpusFormat::jsonl;
  if (cmd->count("--stratified-null") > 0)
    config.stratified_null = opts.config.stratified_null;
  if (cmd->count("--no-unknown-in-size") > 0)
    config.count_unknown_in_size = opts.config.count_unknown_in_size;
  if (opts.ci_mode && !opts.seed_given)
    throw CLI::ValidationError("--ci requires an explicit --seed");
  return config;
}

int run_stage(const std::string& name, const coauth::RunConfig& config) {
  using Fn = nlohmann::json (*)(const coauth::RunConfig&);
  static const std::map<std::string, Fn> stages = {
      {"ingest", coauth::pipeline::stage_ingest},
      {"topics", coauth::pipeline::stage_topics},
      {"profiles", coauth::pipeline::stage_profiles},
      {"graph", coauth::pipeline::stage_graph},
      {"metrics", coauth::pipeline::stage_metrics},
      {"centrality", coauth::pipeline::stage_centrality},
      {"nullmodel", coauth::pipeline::stage_nullmodel},
      {"stats", coauth::pipeline::stage_stats},
      {"report", coauth::pipeline::stage_report}};
  const auto summary = stages.at(name)(config);
  std::cout << name << ": " << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gender-aware co-authorship network analysis"};
  app.require_subcommand(1);

  CliOptions opts;
  const std::vector<std::string> stage_names = {"ingest",     "topics",    "profiles",
                                                "graph",      "metrics",   "centrality",
                                                "nullmodel",  "stats",     "report"};
  std::map<std::string, CLI::App*> commands;
  CLI::App* run_cmd = app.add_subcommand("run", "execute the full pipeline");
  add_common_options(run_cmd, opts);
  commands["run"] = run_cmd;
  for (const auto& name : stage_names) {
    CLI::App* cmd = app.add_subcommand(name, "run the '" + name + "' stage");
    add_common_options(cmd, opts);
    commands[name] = cmd;
  }

  CLI::App* fixture_cmd =
      app.add_subcommand("fixture", "generate the synthetic demo corpus and lexicon");
  coauth::FixtureParams fixture_params;
  std::string fixture_out = "fixture";
  fixture_cmd->add_option("--out", fixture_out, "output directory");
  fixture_cmd->add_option("--pubs", fixture_params.n_pubs, "publications");
  fixture_cmd->add_option("--authors", fixture_params.n_authors, "author pool size");
  fixture_cmd->add_option("--topics", fixture_params.n_topics, "planted topics");
  fixture_cmd->add_option("--seed", fixture_params.seed, "RNG seed");
  fixture_cmd->add_flag("--with-invalid", fixture_params.include_invalid_records,
                        "append records the filter must drop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fixture_cmd->parsed()) {
      const auto fx = coauth::make_fixture(fixture_params);
      coauth::write_fixture(fx, fixture_out);
      std::cout << "fixture: " << fx.records.size() << " records, " << fx.authors.size()
                << " authors -> " << fixture_out << "\n";
      return 0;
    }
    for (const auto& [name, cmd] : commands) {
      if (!cmd->parsed()) continue;
      const auto config = resolve_config(cmd, opts);
      if (name == "run") return coauth::run_pipeline(config);
      return run_stage(name, config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
