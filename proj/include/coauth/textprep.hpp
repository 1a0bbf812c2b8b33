#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coauth {

using StopwordSet = std::unordered_set<std::string>;

// Basic English list plus the search-query terms, so the query phrases do
// not dominate the fitted topics. Callers may load their own file instead.
inline const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "the", "and", "for", "that", "this", "with", "from", "are", "was", "were",
      "been", "being", "have", "has", "had", "not", "but", "can", "could", "will",
      "would", "should", "may", "might", "must", "shall", "they", "them", "their",
      "theirs", "she", "her", "hers", "him", "his", "its", "our", "ours", "your",
      "yours", "who", "whom", "whose", "which", "what", "when", "where", "why",
      "how", "all", "any", "both", "each", "few", "more", "most", "other", "some",
      "such", "only", "own", "same", "than", "too", "very", "just", "also", "into",
      "over", "under", "again", "further", "then", "once", "here", "there", "between",
      "through", "during", "before", "after", "above", "below", "out", "off", "about",
      "against", "because", "until", "while", "these", "those", "among", "via",
      "per", "use", "used", "using", "based", "new", "one", "two", "three",
      "paper", "propose", "proposed", "approach", "method", "methods", "results",
      "study", "however", "thus", "therefore",
      // query terms
      "artificial", "intelligence", "machine", "learning", "deep"};
  return words;
}

// One token per line, UTF-8, lowercased.
inline StopwordSet load_stopwords(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open stop-word file: " + path);
  StopwordSet words;
  std::string line;
  while (std::getline(is, line)) {
    while (!line.empty() &&
           (line.back() == '\r' || std::isspace(static_cast<unsigned char>(line.back()))))
      line.pop_back();
    std::size_t begin = 0;
    while (begin < line.size() && std::isspace(static_cast<unsigned char>(line[begin]))) ++begin;
    if (begin > 0) line.erase(0, begin);
    if (line.empty()) continue;
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(line);
  }
  return words;
}

struct TokenizedDoc {
  std::string pub_id;
  std::vector<std::string> tokens;  // each matches [a-z]{3,}, none a stop-word
};

// Title and abstract merged, lowercased, split on anything non-alphabetic;
// tokens shorter than three characters and stop-words are dropped.
inline std::vector<std::string> preprocess_text(const std::string& title,
                                                const std::string& abstract,
                                                const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&]() {
    if (current.size() >= 3 && !stopwords.count(current)) tokens.push_back(current);
    current.clear();
  };
  const auto scan = [&](const std::string& text) {
    for (char raw : text) {
      const unsigned char c = static_cast<unsigned char>(raw);
      if (c >= 'a' && c <= 'z') {
        current.push_back(raw);
      } else if (c >= 'A' && c <= 'Z') {
        current.push_back(static_cast<char>(c - 'A' + 'a'));
      } else {
        flush();
      }
    }
    flush();
  };
  scan(title);
  scan(abstract);
  return tokens;
}

inline TokenizedDoc preprocess(const std::string& pub_id, const std::string& title,
                               const std::string& abstract, const StopwordSet& stopwords) {
  return TokenizedDoc{pub_id, preprocess_text(title, abstract, stopwords)};
}

struct DocTermMatrix {
  std::vector<std::string> vocab;     // lexicographic, indices dense [0, V)
  std::vector<std::string> doc_ids;   // row order
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> rows;  // (term, count>0)

  std::size_t num_docs() const { return doc_ids.size(); }
  std::size_t vocab_size() const { return vocab.size(); }

  std::size_t doc_tokens(std::size_t d) const {
    std::size_t n = 0;
    for (const auto& [term, count] : rows[d]) n += static_cast<std::size_t>(count);
    return n;
  }

  std::size_t total_tokens() const {
    std::size_t n = 0;
    for (std::size_t d = 0; d < rows.size(); ++d) n += doc_tokens(d);
    return n;
  }
};

struct DtmBuildResult {
  DocTermMatrix dtm;
  std::vector<std::string> dropped_docs;  // emptied by vocabulary pruning
};

// Vocabulary keeps terms appearing in at least min_df documents; documents
// emptied by the pruning are excluded and reported.
inline DtmBuildResult build_dtm(const std::vector<TokenizedDoc>& docs, int min_df = 2) {
  if (docs.empty()) throw std::runtime_error("build_dtm: no documents");
  if (min_df < 1) throw std::invalid_argument("build_dtm: min_df must be >= 1");

  std::unordered_map<std::string, int> doc_freq;
  for (const auto& doc : docs) {
    std::unordered_set<std::string> seen;
    for (const auto& tok : doc.tokens)
      if (seen.insert(tok).second) ++doc_freq[tok];
  }

  std::map<std::string, std::int32_t> vocab_index;  // ordered => lexicographic indices
  for (const auto& [term, df] : doc_freq)
    if (df >= min_df) vocab_index[term] = 0;
  if (vocab_index.empty())
    throw std::runtime_error("build_dtm: vocabulary is empty (every term below min_df=" +
                             std::to_string(min_df) + ")");
  std::int32_t next = 0;
  DtmBuildResult result;
  for (auto& [term, idx] : vocab_index) {
    idx = next++;
    result.dtm.vocab.push_back(term);
  }

  for (const auto& doc : docs) {
    std::map<std::int32_t, std::int32_t> counts;
    for (const auto& tok : doc.tokens) {
      const auto it = vocab_index.find(tok);
      if (it != vocab_index.end()) ++counts[it->second];
    }
    if (counts.empty()) {
      result.dropped_docs.push_back(doc.pub_id);
      continue;
    }
    result.dtm.doc_ids.push_back(doc.pub_id);
    result.dtm.rows.emplace_back(counts.begin(), counts.end());
  }
  if (result.dtm.doc_ids.empty())
    throw std::runtime_error("build_dtm: every document became empty after pruning");
  return result;
}

}  // namespace coauth
