#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "coauth/table.hpp"

namespace coauth {

enum class Gender : std::uint8_t { F, M, U };

inline char gender_code(Gender g) {
  switch (g) {
    case Gender::F: return 'F';
    case Gender::M: return 'M';
    default: return 'U';
  }
}

inline std::optional<Gender> gender_from_code(const std::string& s) {
  if (s == "F" || s == "f") return Gender::F;
  if (s == "M" || s == "m") return Gender::M;
  if (s == "U" || s == "u") return Gender::U;
  return std::nullopt;
}

struct AuthorRef {
  std::string author_id;
  std::string full_name;
  Gender gender = Gender::U;
  // Set by filter_corpus for U authors on kept records: they still count
  // toward team size but carry no gender-keyed metrics.
  bool excluded_from_analysis = false;
};

struct PublicationRecord {
  std::string pub_id;
  std::string title;
  std::string abstract;
  int year = 0;
  int citation_count = 0;
  std::vector<AuthorRef> authors;
};

inline std::string normalize_name_key(const std::string& raw) {
  std::size_t begin = 0, end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string key = raw.substr(begin, end - begin);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return key;
}

// Given-name -> gender lookup; replaces a trained classifier, so accuracy is
// entirely a property of the supplied table.
struct GenderLexicon {
  std::unordered_map<std::string, Gender> entries;

  void add(const std::string& name, Gender g) { entries[normalize_name_key(name)] = g; }

  static GenderLexicon load_csv(const std::string& path) {
    GenderLexicon lex;
    auto rows = csv::read_file(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
      if (i == 0 && !row.empty() && normalize_name_key(row[0]) == "name") continue;  // header
      if (row.size() < 2)
        throw std::runtime_error("lexicon row " + std::to_string(i + 1) + ": expected name,gender");
      const auto g = gender_from_code(row[1]);
      if (!g)
        throw std::runtime_error("lexicon row " + std::to_string(i + 1) + ": gender must be F, M or U");
      lex.add(row[0], *g);
    }
    return lex;
  }
};

// Lookup keyed on the normalized first whitespace-delimited token of the
// name; anything the lexicon does not know is U, never an error.
inline Gender assign_gender(const std::string& full_name, const GenderLexicon& lexicon) {
  std::size_t begin = 0;
  while (begin < full_name.size() && std::isspace(static_cast<unsigned char>(full_name[begin])))
    ++begin;
  std::size_t end = begin;
  while (end < full_name.size() && !std::isspace(static_cast<unsigned char>(full_name[end]))) ++end;
  const std::string key = normalize_name_key(full_name.substr(begin, end - begin));
  const auto it = lexicon.entries.find(key);
  return it == lexicon.entries.end() ? Gender::U : it->second;
}

inline void apply_gender(std::vector<PublicationRecord>& records, const GenderLexicon& lexicon) {
  for (auto& rec : records)
    for (auto& a : rec.authors) a.gender = assign_gender(a.full_name, lexicon);
}

enum class CorpusFormat { jsonl, csv };

struct ParseError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<PublicationRecord> records;
  std::vector<ParseError> errors;
};

namespace detail {

inline PublicationRecord record_from_json(const nlohmann::json& j) {
  PublicationRecord rec;
  const auto require = [&](const char* key) -> const nlohmann::json& {
    const auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error(std::string("missing field \"") + key + "\"");
    return *it;
  };
  const auto& pid = require("pub_id");
  if (!pid.is_string()) throw std::runtime_error("field \"pub_id\" must be a string");
  rec.pub_id = pid.get<std::string>();
  const auto& title = require("title");
  if (!title.is_string()) throw std::runtime_error("field \"title\" must be a string");
  rec.title = title.get<std::string>();
  const auto& abs = require("abstract");
  if (!abs.is_string()) throw std::runtime_error("field \"abstract\" must be a string");
  rec.abstract = abs.get<std::string>();
  const auto& year = require("year");
  if (!year.is_number_integer()) throw std::runtime_error("field \"year\" must be an integer");
  rec.year = year.get<int>();
  const auto& cites = require("citation_count");
  if (!cites.is_number_integer() || cites.get<long long>() < 0)
    throw std::runtime_error("field \"citation_count\" must be a non-negative integer");
  rec.citation_count = cites.get<int>();
  const auto& authors = require("authors");
  if (!authors.is_array() || authors.empty())
    throw std::runtime_error("field \"authors\" must be a non-empty array");
  for (const auto& a : authors) {
    AuthorRef ref;
    if (!a.contains("author_id") || !a["author_id"].is_string())
      throw std::runtime_error("author entry missing string \"author_id\"");
    ref.author_id = a["author_id"].get<std::string>();
    if (!a.contains("full_name") || !a["full_name"].is_string())
      throw std::runtime_error("author entry missing string \"full_name\"");
    ref.full_name = a["full_name"].get<std::string>();
    if (a.contains("gender") && a["gender"].is_string()) {
      if (const auto g = gender_from_code(a["gender"].get<std::string>())) ref.gender = *g;
    }
    rec.authors.push_back(std::move(ref));
  }
  return rec;
}

inline std::vector<AuthorRef> authors_from_csv_field(const std::string& field) {
  std::vector<AuthorRef> out;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    const std::size_t next = field.find(';', pos);
    const std::string item =
        field.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!item.empty()) {
      const std::size_t bar = item.find('|');
      if (bar == std::string::npos)
        throw std::runtime_error("author list entry must be author_id|full_name");
      AuthorRef ref;
      ref.author_id = item.substr(0, bar);
      ref.full_name = item.substr(bar + 1);
      out.push_back(std::move(ref));
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

// One record per input line/row. Schema failures are collected with their
// line number, never silently dropped.
inline ParseResult parse_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open corpus file: " + path);
  ParseResult result;

  if (format == CorpusFormat::jsonl) {
    std::string line;
    std::size_t lineno = 0;
    std::unordered_set<std::string> seen_ids;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        auto rec = detail::record_from_json(j);
        if (!seen_ids.insert(rec.pub_id).second)
          throw std::runtime_error("duplicate pub_id \"" + rec.pub_id + "\"");
        result.records.push_back(std::move(rec));
      } catch (const std::exception& e) {
        result.errors.push_back({lineno, e.what()});
      }
    }
    return result;
  }

  // CSV: header pub_id,title,abstract,year,citation_count,authors
  auto rows = csv::read_file(path);
  if (rows.empty()) return result;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;
    try {
      if (row.size() != 6) throw std::runtime_error("expected 6 columns");
      PublicationRecord rec;
      rec.pub_id = row[0];
      rec.title = row[1];
      rec.abstract = row[2];
      try {
        rec.year = std::stoi(row[3]);
      } catch (...) {
        throw std::runtime_error("field \"year\" must be an integer");
      }
      try {
        rec.citation_count = std::stoi(row[4]);
      } catch (...) {
        throw std::runtime_error("field \"citation_count\" must be an integer");
      }
      if (rec.citation_count < 0)
        throw std::runtime_error("field \"citation_count\" must be non-negative");
      rec.authors = detail::authors_from_csv_field(row[5]);
      if (rec.authors.empty()) throw std::runtime_error("field \"authors\" must be non-empty");
      if (!seen_ids.insert(rec.pub_id).second)
        throw std::runtime_error("duplicate pub_id \"" + rec.pub_id + "\"");
      result.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      result.errors.push_back({i + 1, e.what()});
    }
  }
  return result;
}

struct FilterStats {
  std::size_t dropped_all_unknown = 0;
  std::size_t dropped_missing_text = 0;
  std::size_t dropped_year = 0;
  std::size_t kept = 0;
};

// Inclusion rules: every kept record has at least one gendered author, a
// non-empty title and abstract, and a year inside the window. U authors on
// kept records are flagged rather than removed so |p| stays the byline size.
inline std::vector<PublicationRecord> filter_corpus(const std::vector<PublicationRecord>& records,
                                                    int year_min = 2000, int year_max = 2019,
                                                    FilterStats* stats = nullptr) {
  std::vector<PublicationRecord> kept;
  FilterStats local;
  for (const auto& rec : records) {
    if (rec.title.empty() || rec.abstract.empty()) {
      ++local.dropped_missing_text;
      continue;
    }
    if (rec.year < year_min || rec.year > year_max) {
      ++local.dropped_year;
      continue;
    }
    const bool any_gendered = std::any_of(rec.authors.begin(), rec.authors.end(),
                                          [](const AuthorRef& a) { return a.gender != Gender::U; });
    if (!any_gendered) {
      ++local.dropped_all_unknown;
      continue;
    }
    PublicationRecord out = rec;
    for (auto& a : out.authors) a.excluded_from_analysis = (a.gender == Gender::U);
    kept.push_back(std::move(out));
  }
  local.kept = kept.size();
  if (stats) *stats = local;
  return kept;
}

inline nlohmann::json record_to_json(const PublicationRecord& rec) {
  nlohmann::json authors = nlohmann::json::array();
  for (const auto& a : rec.authors) {
    authors.push_back({{"author_id", a.author_id},
                       {"full_name", a.full_name},
                       {"gender", std::string(1, gender_code(a.gender))}});
  }
  return {{"pub_id", rec.pub_id},     {"title", rec.title},
          {"abstract", rec.abstract}, {"year", rec.year},
          {"citation_count", rec.citation_count}, {"authors", authors}};
}

inline void write_corpus_jsonl(const std::vector<PublicationRecord>& records,
                               const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& rec : records) os << record_to_json(rec).dump() << '\n';
}

}  // namespace coauth
