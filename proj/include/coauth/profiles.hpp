#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/table.hpp"
#include "coauth/topicmodel.hpp"

namespace coauth {

// Document-topic rows keyed by pub_id; the slice of an LdaModel the profile
// and indicator stages need, also reloadable from the exported CSV.
struct DocTopics {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> index;

  static DocTopics from_model(const LdaModel& model) {
    DocTopics dt;
    dt.doc_ids = model.doc_ids;
    dt.rows = model.doc_topic;
    dt.rebuild_index();
    return dt;
  }

  void rebuild_index() {
    index.clear();
    for (std::size_t i = 0; i < doc_ids.size(); ++i) index[doc_ids[i]] = i;
  }

  const std::vector<double>* find(const std::string& pub_id) const {
    const auto it = index.find(pub_id);
    return it == index.end() ? nullptr : &rows[it->second];
  }

  std::size_t num_topics() const { return rows.empty() ? 0 : rows[0].size(); }

  void write_csv(const std::string& path) const {
    MetricTable table;
    table.columns.push_back("pub_id");
    for (std::size_t k = 0; k < num_topics(); ++k)
      table.columns.push_back("p_topic" + std::to_string(k));
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
      std::vector<std::string> row{doc_ids[i]};
      for (double v : rows[i]) row.push_back(format_double(v));
      table.add_row(std::move(row));
    }
    csv::write_file(path, table);
  }

  static DocTopics read_csv(const std::string& path) {
    const auto cells = csv::read_file(path);
    if (cells.empty()) throw std::runtime_error("doc-topic csv is empty: " + path);
    DocTopics dt;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto& row = cells[i];
      if (row.size() < 2) continue;
      dt.doc_ids.push_back(row[0]);
      std::vector<double> vals;
      for (std::size_t c = 1; c < row.size(); ++c) vals.push_back(parse_double(row[c]));
      dt.rows.push_back(std::move(vals));
    }
    dt.rebuild_index();
    return dt;
  }
};

struct AuthorProfile {
  std::string author_id;
  Gender gender = Gender::U;
  std::vector<double> topic_vector;   // mean of doc-topic rows, sums to 1
  int primary_discipline = 0;         // argmax, lowest index on ties
  int active_field_count = 0;         // entries above activity_threshold
  double activity_threshold = 0.05;
  std::vector<std::string> pub_ids;
};

// Unweighted mean over the author's publications. U authors are skipped;
// authors whose every publication lost its doc-topic row are skipped with a
// warning. Output sorted by author_id.
inline std::vector<AuthorProfile> build_profiles(const DocTopics& doc_topics,
                                                 const std::vector<PublicationRecord>& corpus,
                                                 double tau = 0.05) {
  if (tau < 0 || tau >= 1) throw std::invalid_argument("build_profiles: tau must be in [0, 1)");

  struct Accum {
    Gender gender;
    std::vector<double> sum;
    std::vector<std::string> pubs;
  };
  std::map<std::string, Accum> accum;  // ordered => deterministic output
  std::size_t skipped_pubs = 0;
  for (const auto& rec : corpus) {
    const auto* row = doc_topics.find(rec.pub_id);
    if (!row) {
      ++skipped_pubs;
      continue;
    }
    for (const auto& author : rec.authors) {
      if (author.gender == Gender::U) continue;
      auto [it, inserted] = accum.try_emplace(author.author_id);
      if (inserted) {
        it->second.gender = author.gender;
        it->second.sum.assign(row->size(), 0.0);
      }
      for (std::size_t k = 0; k < row->size(); ++k) it->second.sum[k] += (*row)[k];
      it->second.pubs.push_back(rec.pub_id);
    }
  }
  if (skipped_pubs > 0)
    std::cerr << "build_profiles: " << skipped_pubs
              << " publication(s) had no topic row and were skipped\n";

  std::vector<AuthorProfile> profiles;
  profiles.reserve(accum.size());
  for (auto& [author_id, acc] : accum) {
    AuthorProfile p;
    p.author_id = author_id;
    p.gender = acc.gender;
    p.activity_threshold = tau;
    p.pub_ids = std::move(acc.pubs);
    const double n = static_cast<double>(p.pub_ids.size());
    p.topic_vector.resize(acc.sum.size());
    for (std::size_t k = 0; k < acc.sum.size(); ++k) p.topic_vector[k] = acc.sum[k] / n;
    p.primary_discipline = 0;
    for (std::size_t k = 1; k < p.topic_vector.size(); ++k)
      if (p.topic_vector[k] > p.topic_vector[static_cast<std::size_t>(p.primary_discipline)])
        p.primary_discipline = static_cast<int>(k);
    p.active_field_count = 0;
    for (double v : p.topic_vector)
      if (v > tau) ++p.active_field_count;
    profiles.push_back(std::move(p));
  }
  return profiles;
}

// Profiles indexed by author_id.
struct ProfileSet {
  std::vector<AuthorProfile> items;
  std::unordered_map<std::string, std::size_t> index;

  ProfileSet() = default;
  explicit ProfileSet(std::vector<AuthorProfile> profiles) : items(std::move(profiles)) {
    for (std::size_t i = 0; i < items.size(); ++i) index[items[i].author_id] = i;
  }

  const AuthorProfile* find(const std::string& author_id) const {
    const auto it = index.find(author_id);
    return it == index.end() ? nullptr : &items[it->second];
  }

  std::size_t size() const { return items.size(); }
};

inline void write_profiles_csv(const std::vector<AuthorProfile>& profiles,
                               const std::string& path) {
  MetricTable table;
  const std::size_t K = profiles.empty() ? 0 : profiles[0].topic_vector.size();
  table.columns = {"author_id", "gender", "n_d", "primary", "tau"};
  for (std::size_t k = 0; k < K; ++k) table.columns.push_back("x" + std::to_string(k));
  for (const auto& p : profiles) {
    std::vector<std::string> row{p.author_id, std::string(1, gender_code(p.gender)),
                                 std::to_string(p.active_field_count),
                                 std::to_string(p.primary_discipline),
                                 format_double(p.activity_threshold)};
    for (double v : p.topic_vector) row.push_back(format_double(v));
    table.add_row(std::move(row));
  }
  csv::write_file(path, table);
}

inline std::vector<AuthorProfile> read_profiles_csv(const std::string& path) {
  const auto cells = csv::read_file(path);
  if (cells.empty()) throw std::runtime_error("profiles csv is empty: " + path);
  std::vector<AuthorProfile> profiles;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& row = cells[i];
    if (row.size() < 6) continue;
    AuthorProfile p;
    p.author_id = row[0];
    p.gender = gender_from_code(row[1]).value_or(Gender::U);
    p.active_field_count = std::stoi(row[2]);
    p.primary_discipline = std::stoi(row[3]);
    p.activity_threshold = parse_double(row[4]);
    for (std::size_t c = 5; c < row.size(); ++c) p.topic_vector.push_back(parse_double(row[c]));
    profiles.push_back(std::move(p));
  }
  return profiles;
}

}  // namespace coauth
