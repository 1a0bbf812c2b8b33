#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coauth/centrality.hpp"
#include "coauth/corpus.hpp"
#include "coauth/diversity.hpp"
#include "coauth/fixture.hpp"
#include "coauth/graph.hpp"
#include "coauth/indicators.hpp"
#include "coauth/nullmodel.hpp"
#include "coauth/profiles.hpp"
#include "coauth/stats.hpp"
#include "coauth/table.hpp"
#include "coauth/textprep.hpp"
#include "coauth/topicmodel.hpp"

namespace coauth {

struct RunConfig {
  std::string corpus_path;
  std::string lexicon_path;
  std::string stopwords_path;  // empty => built-in list
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  std::string out_dir = "out";

  int num_topics = 8;
  double alpha = -1;  // <= 0 => 50/K
  double beta = kDefaultBeta;
  int iterations = kDefaultIterations;
  int min_df = 2;
  std::vector<int> k_candidates;  // optional model-selection sweep

  double tau = 0.05;
  double core_fraction = 0.05;
  double top_fraction = 0.001;
  int permutations = 10000;
  std::uint64_t seed = 0;
  int year_min = 2000;
  int year_max = 2019;
  double confidence = 0.95;
  double margin = 0.01;
  bool stratified_null = false;
  bool count_unknown_in_size = true;
  int exact_bc_threshold = 10000;
  int bc_sources = 1024;
  int threads = 1;

  void validate() const {
    if (corpus_path.empty()) throw std::invalid_argument("config: corpus path is required");
    if (lexicon_path.empty()) throw std::invalid_argument("config: lexicon path is required");
    if (num_topics < 1) throw std::invalid_argument("config: num_topics must be >= 1");
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (tau < 0 || tau >= 1) throw std::invalid_argument("config: tau must be in [0, 1)");
    if (core_fraction <= 0 || core_fraction >= 1)
      throw std::invalid_argument("config: core_fraction must be in (0, 1)");
    if (top_fraction <= 0 || top_fraction > 1)
      throw std::invalid_argument("config: top_fraction must be in (0, 1]");
    if (permutations < 1) throw std::invalid_argument("config: permutations must be >= 1");
    if (year_min > year_max) throw std::invalid_argument("config: year window is inverted");
    if (margin <= 0 || margin >= 1) throw std::invalid_argument("config: margin must be in (0, 1)");
    if (confidence <= 0 || confidence >= 1)
      throw std::invalid_argument("config: confidence must be in (0, 1)");
    if (min_df < 1) throw std::invalid_argument("config: min_df must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (bc_sources < 1) throw std::invalid_argument("config: bc_sources must be >= 1");
  }

  nlohmann::json to_json() const {
    return {{"corpus_path", corpus_path},
            {"lexicon_path", lexicon_path},
            {"stopwords_path", stopwords_path},
            {"corpus_format", corpus_format == CorpusFormat::jsonl ? "jsonl" : "csv"},
            {"out_dir", out_dir},
            {"num_topics", num_topics},
            {"alpha", alpha},
            {"beta", beta},
            {"iterations", iterations},
            {"min_df", min_df},
            {"k_candidates", k_candidates},
            {"tau", tau},
            {"core_fraction", core_fraction},
            {"top_fraction", top_fraction},
            {"permutations", permutations},
            {"seed", seed},
            {"year_min", year_min},
            {"year_max", year_max},
            {"confidence", confidence},
            {"margin", margin},
            {"stratified_null", stratified_null},
            {"count_unknown_in_size", count_unknown_in_size},
            {"exact_bc_threshold", exact_bc_threshold},
            {"bc_sources", bc_sources},
            {"threads", threads}};
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.corpus_path = j.value("corpus_path", c.corpus_path);
    c.lexicon_path = j.value("lexicon_path", c.lexicon_path);
    c.stopwords_path = j.value("stopwords_path", c.stopwords_path);
    if (j.value("corpus_format", "jsonl") == std::string("csv"))
      c.corpus_format = CorpusFormat::csv;
    c.out_dir = j.value("out_dir", c.out_dir);
    c.num_topics = j.value("num_topics", c.num_topics);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.iterations = j.value("iterations", c.iterations);
    c.min_df = j.value("min_df", c.min_df);
    c.k_candidates = j.value("k_candidates", c.k_candidates);
    c.tau = j.value("tau", c.tau);
    c.core_fraction = j.value("core_fraction", c.core_fraction);
    c.top_fraction = j.value("top_fraction", c.top_fraction);
    c.permutations = j.value("permutations", c.permutations);
    c.seed = j.value("seed", c.seed);
    c.year_min = j.value("year_min", c.year_min);
    c.year_max = j.value("year_max", c.year_max);
    c.confidence = j.value("confidence", c.confidence);
    c.margin = j.value("margin", c.margin);
    c.stratified_null = j.value("stratified_null", c.stratified_null);
    c.count_unknown_in_size = j.value("count_unknown_in_size", c.count_unknown_in_size);
    c.exact_bc_threshold = j.value("exact_bc_threshold", c.exact_bc_threshold);
    c.bc_sources = j.value("bc_sources", c.bc_sources);
    c.threads = j.value("threads", c.threads);
    return c;
  }

  static RunConfig from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    is >> j;
    return from_json(j);
  }
};

namespace pipeline {

namespace fs = std::filesystem;

inline std::string stage_path(const RunConfig& config, const char* file) {
  return (fs::path(config.out_dir) / file).string();
}

inline void require_stage_file(const RunConfig& config, const char* file, const char* stage) {
  if (!fs::exists(stage_path(config, file)))
    throw std::runtime_error(std::string("missing ") + file + " - run the '" + stage +
                             "' stage first");
}

inline std::vector<PublicationRecord> load_filtered_corpus(const RunConfig& config) {
  require_stage_file(config, "corpus_filtered.jsonl", "ingest");
  auto parsed = parse_corpus(stage_path(config, "corpus_filtered.jsonl"), CorpusFormat::jsonl);
  if (!parsed.errors.empty())
    throw std::runtime_error("corpus_filtered.jsonl is corrupt: " + parsed.errors[0].message);
  // Filtering is idempotent; re-running restores the U-author flags.
  return filter_corpus(parsed.records, config.year_min, config.year_max);
}

inline ProfileSet load_profiles(const RunConfig& config) {
  require_stage_file(config, "profiles.csv", "profiles");
  return ProfileSet(read_profiles_csv(stage_path(config, "profiles.csv")));
}

// ingest: parse raw corpus, assign genders from the lexicon, filter.
inline nlohmann::json stage_ingest(const RunConfig& config) {
  auto parsed = parse_corpus(config.corpus_path, config.corpus_format);
  const auto lexicon = GenderLexicon::load_csv(config.lexicon_path);
  apply_gender(parsed.records, lexicon);
  FilterStats fstats;
  const auto kept = filter_corpus(parsed.records, config.year_min, config.year_max, &fstats);

  fs::create_directories(config.out_dir);
  write_corpus_jsonl(kept, stage_path(config, "corpus_filtered.jsonl"));
  csv::write_file(stage_path(config, "authors_per_year.csv"), authors_per_year(kept));
  if (!parsed.errors.empty()) {
    MetricTable errors;
    errors.columns = {"line", "error"};
    for (const auto& e : parsed.errors)
      errors.add_row({std::to_string(e.line), e.message});
    csv::write_file(stage_path(config, "parse_errors.csv"), errors);
  }
  return {{"records_parsed", parsed.records.size()},
          {"parse_errors", parsed.errors.size()},
          {"records_kept", fstats.kept},
          {"dropped_all_unknown", fstats.dropped_all_unknown},
          {"dropped_missing_text", fstats.dropped_missing_text},
          {"dropped_year", fstats.dropped_year}};
}

// topics: preprocess text, build the document-term matrix, fit LDA.
inline nlohmann::json stage_topics(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const StopwordSet stopwords = config.stopwords_path.empty()
                                    ? default_stopwords()
                                    : load_stopwords(config.stopwords_path);
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& rec : corpus)
    docs.push_back(preprocess(rec.pub_id, rec.title, rec.abstract, stopwords));
  const auto built = build_dtm(docs, config.min_df);

  const double alpha = config.alpha > 0 ? config.alpha : default_alpha(config.num_topics);
  const auto model = fit_lda(built.dtm, config.num_topics, alpha, config.beta,
                             config.iterations, config.seed);
  save_model(model, stage_path(config, "model.json"));
  DocTopics::from_model(model).write_csv(stage_path(config, "doc_topics.csv"));

  nlohmann::json summary = {{"documents", built.dtm.num_docs()},
                            {"vocabulary", built.dtm.vocab_size()},
                            {"tokens", built.dtm.total_tokens()},
                            {"dropped_empty_docs", built.dropped_docs.size()},
                            {"perplexity", perplexity(model, built.dtm)}};
  if (!config.k_candidates.empty()) {
    const auto rows = select_k(built.dtm, config.k_candidates, config.seed, config.alpha,
                               config.beta, config.iterations);
    MetricTable table;
    table.columns = {"K", "perplexity", "log_likelihood"};
    for (const auto& row : rows)
      table.add_row({std::to_string(row.num_topics), format_double(row.perplexity),
                     format_double(row.log_likelihood)});
    csv::write_file(stage_path(config, "k_selection.csv"), table);
    summary["k_candidates"] = config.k_candidates.size();
  }
  return summary;
}

// profiles: aggregate doc-topic rows into author disciplinary profiles.
inline nlohmann::json stage_profiles(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  require_stage_file(config, "doc_topics.csv", "topics");
  const auto doc_topics = DocTopics::read_csv(stage_path(config, "doc_topics.csv"));
  const auto profiles = build_profiles(doc_topics, corpus, config.tau);
  write_profiles_csv(profiles, stage_path(config, "profiles.csv"));
  return {{"profiles", profiles.size()}};
}

// graph: monopartite projection, team records, descriptive series.
inline nlohmann::json stage_graph(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const auto profiles = load_profiles(config);
  const auto graph = project(corpus);
  const auto extraction = extract_teams(corpus, profiles, config.count_unknown_in_size);
  write_edges_csv(graph, stage_path(config, "edges.csv"));
  write_nodes_csv(graph, stage_path(config, "nodes.csv"));
  write_teams_csv(extraction.teams, stage_path(config, "teams.csv"));
  csv::write_file(stage_path(config, "degree_stats.csv"), degree_stats(corpus));
  csv::write_file(stage_path(config, "edge_type_shares.csv"), edge_type_shares(corpus));
  return {{"nodes", graph.nodes.size()},
          {"edges", graph.edges.size()},
          {"teams", extraction.teams.size()},
          {"teams_skipped", extraction.skipped.size()}};
}

// metrics: the four diversity measures over authors, edges and teams.
inline nlohmann::json stage_metrics(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const auto profiles = load_profiles(config);
  const auto graph = project(corpus);
  const auto extraction = extract_teams(corpus, profiles, config.count_unknown_in_size);

  MetricTable entropy;
  entropy.columns = {"author_id", "gender", "n_d", "H_i"};
  std::size_t excluded_single_field = 0;
  for (const auto& p : profiles.items) {
    const auto h = author_entropy(p);
    if (!h) {
      ++excluded_single_field;
      continue;
    }
    entropy.add_row({p.author_id, std::string(1, gender_code(p.gender)),
                     std::to_string(p.active_field_count), format_double(*h)});
  }
  csv::write_file(stage_path(config, "author_entropy.csv"), entropy);

  MetricTable cosine;
  cosine.columns = {"src", "dst", "type", "S_ij"};
  for (const auto& e : graph.edges) {
    const auto& a = graph.nodes[static_cast<std::size_t>(e.u)];
    const auto& b = graph.nodes[static_cast<std::size_t>(e.v)];
    const auto* pa = profiles.find(a.author_id);
    const auto* pb = profiles.find(b.author_id);
    if (!pa || !pb) continue;
    cosine.add_row({a.author_id, b.author_id, edge_type_name(e.type),
                    format_double(pair_cosine(*pa, *pb))});
  }
  csv::write_file(stage_path(config, "edge_cosine.csv"), cosine);

  MetricTable teams;
  teams.columns = {"pub_id", "size", "gender_class", "H_p", "S_p"};
  for (const auto& t : extraction.teams) {
    const auto h = team_entropy(t, config.num_topics);
    const auto s = team_cosine(t, profiles);
    teams.add_row({t.pub_id, std::to_string(t.total_size), team_class_name(t.gender_class),
                   h ? format_double(*h) : "", s ? format_double(*s) : ""});
  }
  csv::write_file(stage_path(config, "team_metrics.csv"), teams);

  return {{"authors_scored", entropy.rows.size()},
          {"authors_excluded_single_field", excluded_single_field},
          {"edges_scored", cosine.rows.size()},
          {"teams_scored", teams.rows.size()}};
}

// centrality: betweenness (exact under the node threshold, sampled above),
// core/periphery split and the top-fraction subnetwork.
inline nlohmann::json stage_centrality(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const auto graph = project(corpus);
  const int n = graph.node_count();
  CentralityResult result;
  if (n <= config.exact_bc_threshold) {
    result = betweenness_exact(graph, config.threads);
  } else {
    result = betweenness_sampled(graph, std::min(config.bc_sources, n), config.seed,
                                 config.threads);
  }
  const auto partition = core_periphery(graph, result, config.core_fraction);
  write_centrality_csv(graph, result, partition, stage_path(config, "centrality.csv"));

  const auto subnet = top_subnetwork(graph, result, config.top_fraction, corpus);
  write_nodes_csv(subnet.subgraph, stage_path(config, "subnet_nodes.csv"));
  write_edges_csv(subnet.subgraph, stage_path(config, "subnet_edges.csv"));
  csv::write_file(stage_path(config, "subnet_summary.csv"), subnet.gender_summary);
  return {{"nodes", n},
          {"method", result.method == CentralityResult::Method::exact ? "exact" : "sampled"},
          {"core_size", partition.core.size()},
          {"subnet_nodes", subnet.subgraph.nodes.size()}};
}

// nullmodel: randomized-team reference moments and per-team z-scores.
inline nlohmann::json stage_nullmodel(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const auto profiles = load_profiles(config);
  const auto extraction = extract_teams(corpus, profiles, config.count_unknown_in_size);
  const auto moments =
      build_null_moments(extraction.teams, profiles, config.num_topics, config.confidence,
                         config.margin, config.seed, config.stratified_null);
  write_null_moments_csv(moments, stage_path(config, "null_moments.csv"));
  const auto z = z_scores(extraction.teams, moments, profiles, config.num_topics);
  write_zscores_csv(z, stage_path(config, "z_scores.csv"));
  std::size_t defined = 0;
  for (const auto& rec : z)
    if (rec.z_h || rec.z_s) ++defined;
  return {{"teams", z.size()}, {"teams_with_z", defined}};
}

// stats: descriptive indicator tables plus the test battery over metric
// distributions.
inline nlohmann::json stage_stats(const RunConfig& config) {
  const auto corpus = load_filtered_corpus(config);
  const auto profiles = load_profiles(config);
  require_stage_file(config, "doc_topics.csv", "topics");
  require_stage_file(config, "centrality.csv", "centrality");
  require_stage_file(config, "author_entropy.csv", "metrics");
  require_stage_file(config, "edge_cosine.csv", "metrics");
  const auto doc_topics = DocTopics::read_csv(stage_path(config, "doc_topics.csv"));

  const auto indicators = author_indicators(corpus, doc_topics);
  write_indicators_csv(indicators, stage_path(config, "indicators.csv"));
  csv::write_file(stage_path(config, "fractional_shares.csv"), fractional_shares(corpus));
  {
    const auto fnc = field_normalized_citations(corpus, doc_topics);
    MetricTable table;
    table.columns = {"pub_id", "field", "field_norm_citations"};
    for (const auto& f : fnc)
      table.add_row({f.pub_id, std::to_string(f.field), f.value ? format_double(*f.value) : ""});
    csv::write_file(stage_path(config, "field_normalized.csv"), table);
  }

  // Metric samples for the battery.
  std::vector<double> entropy_f, entropy_m;
  for (const auto& row : csv::read_file(stage_path(config, "author_entropy.csv"))) {
    if (row.size() != 4 || row[0] == "author_id") continue;
    (row[1] == "F" ? entropy_f : entropy_m).push_back(parse_double(row[3]));
  }
  std::map<std::string, std::vector<double>> cosine_by_type;
  for (const auto& row : csv::read_file(stage_path(config, "edge_cosine.csv"))) {
    if (row.size() != 4 || row[0] == "src") continue;
    cosine_by_type[row[2]].push_back(parse_double(row[3]));
  }
  std::unordered_map<std::string, bool> is_core;
  for (const auto& row : csv::read_file(stage_path(config, "centrality.csv"))) {
    if (row.size() != 3 || row[0] == "author_id") continue;
    is_core[row[0]] = (row[2] == "core");
  }

  struct IndicatorSamples {
    std::vector<double> citations, pubs, career;
  };
  std::map<std::string, IndicatorSamples> groups;  // f_core, f_periphery, m_core, m_periphery
  for (const auto& ind : indicators) {
    const auto core_it = is_core.find(ind.author_id);
    if (core_it == is_core.end()) continue;  // isolated from the graph
    std::string key = ind.gender == Gender::F ? "f" : "m";
    key += core_it->second ? "_core" : "_periphery";
    auto& g = groups[key];
    g.citations.push_back(ind.avg_citations);
    g.pubs.push_back(static_cast<double>(ind.pub_count));
    g.career.push_back(static_cast<double>(ind.career_length));
  }

  nlohmann::json tests = nlohmann::json::array();
  const auto push = [&](const stats::TestResult& r, const std::string& label) {
    tests.push_back(stats::to_json(r, label));
  };
  using stats::Alternative;
  using stats::PermStatistic;

  if (!entropy_f.empty() && !entropy_m.empty()) {
    push(stats::mann_whitney_u(entropy_f, entropy_m, Alternative::less), "H_i: F vs M");
    push(stats::permutation_test(entropy_f, entropy_m, PermStatistic::median_diff,
                                 config.permutations, Alternative::two_sided, config.seed + 101),
         "H_i: F vs M");
  }
  const auto cosine_pairs = {std::pair{"FF", "MM"}, std::pair{"FF", "FM"}, std::pair{"FM", "MM"}};
  int offset = 0;
  for (const auto& [ga, gb] : cosine_pairs) {
    ++offset;
    const auto ia = cosine_by_type.find(ga);
    const auto ib = cosine_by_type.find(gb);
    if (ia == cosine_by_type.end() || ib == cosine_by_type.end()) continue;
    if (ia->second.size() < 2 || ib->second.size() < 2) continue;
    const std::string label = std::string("S_ij: ") + ga + " vs " + gb;
    push(stats::mann_whitney_u(ia->second, ib->second, Alternative::two_sided), label);
    push(stats::t_test_welch(ia->second, ib->second, Alternative::greater), label);
    push(stats::permutation_test(ia->second, ib->second, PermStatistic::mean_diff,
                                 config.permutations, Alternative::greater,
                                 config.seed + 200 + static_cast<std::uint64_t>(offset)),
         label);
  }
  for (const char* gender : {"f", "m"}) {
    const auto core = groups.find(std::string(gender) + "_core");
    const auto peri = groups.find(std::string(gender) + "_periphery");
    if (core == groups.end() || peri == groups.end()) continue;
    if (core->second.citations.empty() || peri->second.citations.empty()) continue;
    const std::string label = std::string(gender) + "_core vs " + gender + "_periphery";
    push(stats::mann_whitney_u(core->second.citations, peri->second.citations,
                               Alternative::greater),
         label + ": avg_citations");
    push(stats::mann_whitney_u(core->second.pubs, peri->second.pubs, Alternative::greater),
         label + ": pub_count");
    push(stats::mann_whitney_u(core->second.career, peri->second.career, Alternative::greater),
         label + ": career_length");
  }
  {
    const auto fc = groups.find("f_core");
    const auto mc = groups.find("m_core");
    if (fc != groups.end() && mc != groups.end() && fc->second.citations.size() >= 2 &&
        mc->second.citations.size() >= 2) {
      push(stats::mann_whitney_u(fc->second.citations, mc->second.citations,
                                 Alternative::two_sided),
           "f_core vs m_core: avg_citations");
      push(stats::t_test_welch(fc->second.citations, mc->second.citations, Alternative::less),
           "f_core vs m_core: avg_citations");
      push(stats::t_test_welch(fc->second.career, mc->second.career, Alternative::less),
           "f_core vs m_core: career_length");
      push(stats::t_test_welch(fc->second.pubs, mc->second.pubs, Alternative::less),
           "f_core vs m_core: pub_count");
    }
  }
  {
    std::ofstream os(stage_path(config, "stat_tests.json"), std::ios::binary);
    os << tests.dump(2) << '\n';
  }

  // Group summaries behind the density figures.
  MetricTable summaries;
  summaries.columns = {"metric", "group", "n", "mean", "median", "sd"};
  const auto add_summary = [&](const std::string& metric,
                               const std::map<std::string, std::vector<double>>& by_group) {
    for (const auto& row : stats::group_summary(by_group)) {
      summaries.add_row({metric, row.group, std::to_string(row.n),
                         row.n ? format_double(row.mean) : "", row.n ? format_double(row.median) : "",
                         row.n ? format_double(row.sd) : ""});
    }
  };
  add_summary("H_i", {{"F", entropy_f}, {"M", entropy_m}});
  {
    std::map<std::string, std::vector<double>> m(cosine_by_type.begin(), cosine_by_type.end());
    add_summary("S_ij", m);
  }
  if (fs::exists(stage_path(config, "z_scores.csv"))) {
    std::map<std::string, std::vector<double>> zh, zs;
    for (const auto& row : csv::read_file(stage_path(config, "z_scores.csv"))) {
      if (row.size() != 4 || row[0] == "pub_id") continue;
      if (!row[2].empty()) zh[row[1]].push_back(parse_double(row[2]));
      if (!row[3].empty()) zs[row[1]].push_back(parse_double(row[3]));
    }
    add_summary("z_H", zh);
    add_summary("z_S", zs);
  }
  csv::write_file(stage_path(config, "group_summaries.csv"), summaries);

  return {{"tests", tests.size()}, {"indicator_rows", indicators.size()}};
}

// report: one JSON mapping every figure's data series to its emitted table.
inline nlohmann::json stage_report(const RunConfig& config) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> mapping = {
      {"fig2a_authors_per_year", {"authors_per_year.csv"}},
      {"fig2b_fractional_authorship", {"fractional_shares.csv"}},
      {"fig3a_coauthors_team_size", {"degree_stats.csv"}},
      {"fig3b_collaboration_type_shares", {"edge_type_shares.csv"}},
      {"fig4_author_entropy_density", {"author_entropy.csv", "group_summaries.csv"}},
      {"fig5_pair_cosine_density", {"edge_cosine.csv", "group_summaries.csv"}},
      {"fig6_team_zscore_density", {"z_scores.csv", "null_moments.csv"}},
      {"fig7_citations_core_periphery", {"indicators.csv", "centrality.csv"}},
      {"fig8_publications_core_periphery", {"indicators.csv", "centrality.csv"}},
      {"fig9_career_length_core_periphery", {"indicators.csv", "centrality.csv"}},
      {"fig10_top_subnetwork", {"subnet_nodes.csv", "subnet_edges.csv", "subnet_summary.csv"}},
      {"statistical_tests", {"stat_tests.json"}},
      {"team_metrics", {"team_metrics.csv"}},
  };
  nlohmann::json figures = nlohmann::json::object();
  for (const auto& [figure, files] : mapping) {
    nlohmann::json entry = nlohmann::json::object();
    nlohmann::json list = nlohmann::json::array();
    bool complete = true;
    for (const auto& f : files) {
      list.push_back(f);
      complete = complete && fs::exists(stage_path(config, f.c_str()));
    }
    entry["tables"] = list;
    entry["present"] = complete;
    figures[figure] = entry;
  }
  nlohmann::json report = {{"figures", figures}};
  std::ofstream os(stage_path(config, "report.json"), std::ios::binary);
  os << report.dump(2) << '\n';
  return {{"figures", mapping.size()}};
}

}  // namespace pipeline

// Runs every stage in order and writes a manifest (config echo, seed, counts
// and timings; timings make the manifest the one non-reproducible output).
// On a stage failure the partial outputs are kept and the manifest names the
// failed stage. Returns a process exit code.
inline int run_pipeline(const RunConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  nlohmann::json manifest = {{"config", config.to_json()},
                             {"seed", config.seed},
                             {"stages", nlohmann::json::object()},
                             {"timings_ms", nlohmann::json::object()},
                             {"status", "ok"}};
  using StageFn = nlohmann::json (*)(const RunConfig&);
  const std::vector<std::pair<const char*, StageFn>> stages = {
      {"ingest", pipeline::stage_ingest},       {"topics", pipeline::stage_topics},
      {"profiles", pipeline::stage_profiles},   {"graph", pipeline::stage_graph},
      {"metrics", pipeline::stage_metrics},     {"centrality", pipeline::stage_centrality},
      {"nullmodel", pipeline::stage_nullmodel}, {"stats", pipeline::stage_stats},
      {"report", pipeline::stage_report}};

  const auto write_manifest = [&]() {
    std::ofstream os(pipeline::stage_path(config, "manifest.json"), std::ios::binary);
    os << manifest.dump(2) << '\n';
  };

  for (const auto& [name, fn] : stages) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      manifest["stages"][name] = fn(config);
    } catch (const std::exception& e) {
      manifest["status"] = "failed";
      manifest["failed_stage"] = name;
      manifest["error"] = e.what();
      write_manifest();
      std::cerr << "pipeline: stage '" << name << "' failed: " << e.what() << "\n";
      return 1;
    }
    const auto t1 = std::chrono::steady_clock::now();
    manifest["timings_ms"][name] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  }
  write_manifest();
  return 0;
}

}  // namespace coauth
