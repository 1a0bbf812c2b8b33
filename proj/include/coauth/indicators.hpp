#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/profiles.hpp"
#include "coauth/table.hpp"

namespace coauth {

// h = largest h with h papers cited at least h times; i10 = papers with at
// least ten citations.
inline std::pair<int, int> h_and_i10(std::vector<int> citations) {
  std::sort(citations.begin(), citations.end(), std::greater<int>());
  int h = 0;
  while (h < static_cast<int>(citations.size()) && citations[static_cast<std::size_t>(h)] >= h + 1)
    ++h;
  int i10 = 0;
  for (int c : citations)
    if (c >= 10) ++i10;
  return {h, i10};
}

// Years between first and last publication.
inline int career_length(const std::vector<int>& years) {
  if (years.empty()) throw std::invalid_argument("career_length: no publications");
  const auto [lo, hi] = std::minmax_element(years.begin(), years.end());
  return *hi - *lo;
}

// Fractional authorship: each of the n listed authors earns 1/n per paper.
// Shares aggregate by gender and year as percentages; U credit is its own
// bucket so every year sums to 100.
inline MetricTable fractional_shares(const std::vector<PublicationRecord>& corpus) {
  struct Cell {
    double f = 0, m = 0, u = 0;
  };
  std::map<int, Cell> per_year;
  for (const auto& rec : corpus) {
    const double credit = 1.0 / static_cast<double>(rec.authors.size());
    auto& cell = per_year[rec.year];
    for (const auto& a : rec.authors) {
      switch (a.gender) {
        case Gender::F: cell.f += credit; break;
        case Gender::M: cell.m += credit; break;
        default: cell.u += credit; break;
      }
    }
  }
  MetricTable table;
  table.columns = {"year", "f_pct", "m_pct", "u_pct"};
  for (const auto& [year, cell] : per_year) {
    const double total = cell.f + cell.m + cell.u;
    table.add_row({std::to_string(year), format_double(100.0 * cell.f / total),
                   format_double(100.0 * cell.m / total), format_double(100.0 * cell.u / total)});
  }
  return table;
}

// Publication field = argmax of its topic row (lowest index on ties).
inline int publication_field(const std::vector<double>& topic_row) {
  int field = 0;
  for (std::size_t k = 1; k < topic_row.size(); ++k)
    if (topic_row[k] > topic_row[static_cast<std::size_t>(field)]) field = static_cast<int>(k);
  return field;
}

struct FieldNormalizedCitation {
  std::string pub_id;
  int field = 0;
  std::optional<double> value;  // empty when the (field, year) cell mean is 0
};

// Citations divided by the mean citations of all publications sharing the
// same field and year. Publications without a topic row are skipped.
inline std::vector<FieldNormalizedCitation> field_normalized_citations(
    const std::vector<PublicationRecord>& corpus, const DocTopics& doc_topics) {
  std::map<std::pair<int, int>, std::pair<double, std::size_t>> cells;  // (field, year) -> (sum, n)
  std::vector<std::pair<const PublicationRecord*, int>> assigned;
  for (const auto& rec : corpus) {
    const auto* row = doc_topics.find(rec.pub_id);
    if (!row) continue;
    const int field = publication_field(*row);
    assigned.emplace_back(&rec, field);
    auto& cell = cells[{field, rec.year}];
    cell.first += static_cast<double>(rec.citation_count);
    cell.second += 1;
  }
  std::vector<FieldNormalizedCitation> out;
  out.reserve(assigned.size());
  for (const auto& [rec, field] : assigned) {
    const auto& cell = cells.at({field, rec->year});
    const double mean = cell.first / static_cast<double>(cell.second);
    FieldNormalizedCitation fnc;
    fnc.pub_id = rec->pub_id;
    fnc.field = field;
    if (mean > 0) fnc.value = static_cast<double>(rec->citation_count) / mean;
    out.push_back(std::move(fnc));
  }
  return out;
}

struct AuthorIndicators {
  std::string author_id;
  Gender gender = Gender::U;
  int pub_count = 0;
  long long citation_total = 0;
  double avg_citations = 0;
  std::optional<double> field_norm_citations;  // mean over defined per-pub values
  int career_length = 0;
  int h_index = 0;
  int i10_index = 0;
};

// Descriptive indicators for every gendered author in the corpus, sorted by
// author_id.
inline std::vector<AuthorIndicators> author_indicators(
    const std::vector<PublicationRecord>& corpus, const DocTopics& doc_topics) {
  const auto fnc = field_normalized_citations(corpus, doc_topics);
  std::unordered_map<std::string, std::optional<double>> fnc_by_pub;
  for (const auto& f : fnc) fnc_by_pub[f.pub_id] = f.value;

  struct Acc {
    Gender gender;
    std::vector<int> citations;
    std::vector<int> years;
    double fnc_sum = 0;
    int fnc_n = 0;
  };
  std::map<std::string, Acc> accum;
  for (const auto& rec : corpus) {
    for (const auto& a : rec.authors) {
      if (a.gender == Gender::U) continue;
      auto [it, inserted] = accum.try_emplace(a.author_id);
      if (inserted) it->second.gender = a.gender;
      it->second.citations.push_back(rec.citation_count);
      it->second.years.push_back(rec.year);
      const auto f = fnc_by_pub.find(rec.pub_id);
      if (f != fnc_by_pub.end() && f->second) {
        it->second.fnc_sum += *f->second;
        it->second.fnc_n += 1;
      }
    }
  }

  std::vector<AuthorIndicators> out;
  out.reserve(accum.size());
  for (const auto& [id, acc] : accum) {
    AuthorIndicators ind;
    ind.author_id = id;
    ind.gender = acc.gender;
    ind.pub_count = static_cast<int>(acc.citations.size());
    for (int c : acc.citations) ind.citation_total += c;
    ind.avg_citations = static_cast<double>(ind.citation_total) / ind.pub_count;
    if (acc.fnc_n > 0) ind.field_norm_citations = acc.fnc_sum / acc.fnc_n;
    ind.career_length = career_length(acc.years);
    const auto [h, i10] = h_and_i10(acc.citations);
    ind.h_index = h;
    ind.i10_index = i10;
    out.push_back(std::move(ind));
  }
  return out;
}

// Distinct publishing authors per year and gender.
inline MetricTable authors_per_year(const std::vector<PublicationRecord>& corpus) {
  std::map<int, std::pair<std::set<std::string>, std::set<std::string>>> per_year;
  for (const auto& rec : corpus)
    for (const auto& a : rec.authors) {
      if (a.gender == Gender::F) per_year[rec.year].first.insert(a.author_id);
      else if (a.gender == Gender::M) per_year[rec.year].second.insert(a.author_id);
    }
  MetricTable table;
  table.columns = {"year", "n_female", "n_male"};
  for (const auto& [year, sets] : per_year)
    table.add_row({std::to_string(year), std::to_string(sets.first.size()),
                   std::to_string(sets.second.size())});
  return table;
}

inline void write_indicators_csv(const std::vector<AuthorIndicators>& indicators,
                                 const std::string& path) {
  MetricTable table;
  table.columns = {"author_id", "gender",        "pub_count", "citation_total",
                   "avg_citations", "field_norm_citations", "career_length", "h_index",
                   "i10_index"};
  for (const auto& ind : indicators) {
    table.add_row({ind.author_id, std::string(1, gender_code(ind.gender)),
                   std::to_string(ind.pub_count), std::to_string(ind.citation_total),
                   format_double(ind.avg_citations),
                   ind.field_norm_citations ? format_double(*ind.field_norm_citations) : "",
                   std::to_string(ind.career_length), std::to_string(ind.h_index),
                   std::to_string(ind.i10_index)});
  }
  csv::write_file(path, table);
}

}  // namespace coauth
