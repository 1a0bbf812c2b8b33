#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/random.hpp"

namespace coauth {

// Deterministic synthetic corpus with planted topics, genders and
// homophilous teams, so no test or demo ever needs proprietary data.
struct FixtureParams {
  int n_pubs = 200;
  int n_authors = 80;
  int n_topics = 3;
  int vocab_per_topic = 60;
  int title_tokens = 6;
  int min_abstract_tokens = 30;
  int max_abstract_tokens = 55;
  double homophily = 0.75;      // chance a teammate shares the lead's topic
  double gender_homophily = 0.6;
  double female_share = 0.35;
  double unknown_share = 0.08;  // authors whose names the lexicon cannot resolve
  int max_team = 6;
  int year_min = 2000;
  int year_max = 2019;
  std::uint64_t seed = 42;
  bool include_invalid_records = false;  // adds records the filter must drop
};

struct FixtureAuthor {
  std::string author_id;
  std::string full_name;
  Gender true_gender = Gender::U;
  int planted_topic = 0;
};

struct Fixture {
  std::vector<PublicationRecord> records;
  std::vector<FixtureAuthor> authors;
  GenderLexicon lexicon;
  std::vector<std::vector<std::string>> topic_vocab;  // disjoint blocks
  std::vector<int> planted_topic_of_pub;
};

namespace detail {

inline const std::vector<std::string>& female_given_names() {
  static const std::vector<std::string> names = {
      "anna",   "maria",  "sofia", "elena",  "laura", "julia",  "emma",   "clara",
      "alice",  "nina",   "irene", "paula",  "lucia", "hanna",  "greta",  "dora",
      "ines",   "vera",   "iris",  "silvia", "rosa",  "teresa", "martina", "carmen"};
  return names;
}

inline const std::vector<std::string>& male_given_names() {
  static const std::vector<std::string> names = {
      "james",  "david",  "peter",  "thomas", "martin", "pablo",  "bruno",    "marco",
      "luis",   "victor", "hugo",   "oscar",  "felix",  "jonas",  "anton",    "boris",
      "carlos", "diego",  "erik",   "frank",  "georg",  "henrik", "ivan",     "karl"};
  return names;
}

inline const std::vector<std::string>& unresolved_given_names() {
  // Deliberately absent from the generated lexicon.
  static const std::vector<std::string> names = {"xan", "quin", "zhi", "kim", "ari", "sasha"};
  return names;
}

inline const std::vector<std::string>& surnames() {
  static const std::vector<std::string> names = {
      "smith", "garcia", "mueller", "rossi",  "tanaka", "novak", "silva",  "kovacs",
      "olsen", "dubois", "petrov",  "yilmaz", "fischer", "moreau", "santos", "weber"};
  return names;
}

// Alphabetic-only word for vocabulary slot i of a topic: survives the
// non-alphabetic split and the three-character minimum.
inline std::string vocab_word(int topic, int i) {
  std::string suffix;
  int x = i;
  for (int d = 0; d < 3; ++d) {
    suffix.push_back(static_cast<char>('a' + x % 26));
    x /= 26;
  }
  return std::string("top") + static_cast<char>('a' + topic) + suffix;
}

}  // namespace detail

inline Fixture make_fixture(const FixtureParams& params) {
  Rng rng(params.seed);
  Fixture fx;

  fx.topic_vocab.resize(static_cast<std::size_t>(params.n_topics));
  for (int t = 0; t < params.n_topics; ++t)
    for (int i = 0; i < params.vocab_per_topic; ++i)
      fx.topic_vocab[static_cast<std::size_t>(t)].push_back(detail::vocab_word(t, i));

  for (const auto& n : detail::female_given_names()) fx.lexicon.add(n, Gender::F);
  for (const auto& n : detail::male_given_names()) fx.lexicon.add(n, Gender::M);

  // Author pool.
  for (int i = 0; i < params.n_authors; ++i) {
    FixtureAuthor author;
    author.author_id = "a" + std::to_string(1000 + i);
    const double u = rng.next_double();
    std::string given;
    if (u < params.unknown_share) {
      const auto& pool = detail::unresolved_given_names();
      given = pool[rng.next_below(pool.size())];
      author.true_gender = Gender::U;
    } else if (u < params.unknown_share + params.female_share) {
      const auto& pool = detail::female_given_names();
      given = pool[rng.next_below(pool.size())];
      author.true_gender = Gender::F;
    } else {
      const auto& pool = detail::male_given_names();
      given = pool[rng.next_below(pool.size())];
      author.true_gender = Gender::M;
    }
    const auto& sur = detail::surnames();
    author.full_name = given + " " + sur[rng.next_below(sur.size())];
    author.planted_topic = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params.n_topics)));
    fx.authors.push_back(std::move(author));
  }

  // Authors of a given planted topic, for homophilous team assembly.
  std::vector<std::vector<int>> by_topic(static_cast<std::size_t>(params.n_topics));
  for (int i = 0; i < params.n_authors; ++i)
    by_topic[static_cast<std::size_t>(fx.authors[static_cast<std::size_t>(i)].planted_topic)]
        .push_back(i);

  const auto sample_words = [&](int topic, int count) {
    std::string text;
    const auto& vocab = fx.topic_vocab[static_cast<std::size_t>(topic)];
    for (int i = 0; i < count; ++i) {
      if (i) text += ' ';
      text += vocab[rng.next_below(vocab.size())];
    }
    return text;
  };

  for (int p = 0; p < params.n_pubs; ++p) {
    PublicationRecord rec;
    rec.pub_id = "p" + std::to_string(10000 + p);
    const int topic = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params.n_topics)));
    fx.planted_topic_of_pub.push_back(topic);
    rec.title = sample_words(topic, params.title_tokens);
    const int abstract_len =
        params.min_abstract_tokens +
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(
            params.max_abstract_tokens - params.min_abstract_tokens + 1)));
    rec.abstract = sample_words(topic, abstract_len);
    rec.year = params.year_min +
               static_cast<int>(rng.next_below(
                   static_cast<std::uint64_t>(params.year_max - params.year_min + 1)));
    // Geometric-ish citation counts; a tail reaches past ten so h/i10 vary.
    rec.citation_count = static_cast<int>(std::floor(
        std::log(1.0 - rng.next_double()) / std::log(1.0 - 0.18)));

    const int team_size = 1 + static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(params.max_team)));
    const auto& topical = by_topic[static_cast<std::size_t>(topic)];
    std::vector<int> members;
    const int lead = topical.empty()
                         ? static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params.n_authors)))
                         : topical[rng.next_below(topical.size())];
    members.push_back(lead);
    int attempts = 0;
    while (static_cast<int>(members.size()) < team_size && ++attempts < 500) {
      int candidate;
      if (!topical.empty() && rng.next_double() < params.homophily) {
        candidate = topical[rng.next_below(topical.size())];
      } else {
        candidate = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params.n_authors)));
      }
      // Gender homophily: sometimes insist on the lead's gender.
      const auto lead_gender = fx.authors[static_cast<std::size_t>(lead)].true_gender;
      if (lead_gender != Gender::U && rng.next_double() < params.gender_homophily &&
          fx.authors[static_cast<std::size_t>(candidate)].true_gender != lead_gender)
        continue;
      if (std::find(members.begin(), members.end(), candidate) != members.end()) continue;
      members.push_back(candidate);
    }
    for (int idx : members) {
      const auto& a = fx.authors[static_cast<std::size_t>(idx)];
      rec.authors.push_back({a.author_id, a.full_name, Gender::U, false});
    }
    fx.records.push_back(std::move(rec));
  }

  if (params.include_invalid_records) {
    // Records the inclusion rules must drop: unknown-only byline, missing
    // abstract, out-of-window year.
    PublicationRecord unknown_only;
    unknown_only.pub_id = "px-unknown";
    unknown_only.title = sample_words(0, 5);
    unknown_only.abstract = sample_words(0, 30);
    unknown_only.year = params.year_min + 1;
    unknown_only.citation_count = 1;
    unknown_only.authors.push_back({"ax9001", "xan smith", Gender::U, false});
    unknown_only.authors.push_back({"ax9002", "quin rossi", Gender::U, false});
    fx.records.push_back(std::move(unknown_only));

    PublicationRecord no_abstract;
    no_abstract.pub_id = "px-noabs";
    no_abstract.title = sample_words(1, 5);
    no_abstract.abstract = "";
    no_abstract.year = params.year_min + 2;
    no_abstract.citation_count = 0;
    no_abstract.authors.push_back(
        {fx.authors[0].author_id, fx.authors[0].full_name, Gender::U, false});
    fx.records.push_back(std::move(no_abstract));

    PublicationRecord stale;
    stale.pub_id = "px-stale";
    stale.title = sample_words(2, 5);
    stale.abstract = sample_words(2, 30);
    stale.year = params.year_min - 5;
    stale.citation_count = 3;
    stale.authors.push_back(
        {fx.authors[1].author_id, fx.authors[1].full_name, Gender::U, false});
    fx.records.push_back(std::move(stale));
  }

  return fx;
}

inline void write_fixture(const Fixture& fx, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_corpus_jsonl(fx.records, dir + "/corpus.jsonl");
  MetricTable lex;
  lex.columns = {"name", "gender"};
  std::map<std::string, Gender> ordered(fx.lexicon.entries.begin(), fx.lexicon.entries.end());
  for (const auto& [name, g] : ordered)
    lex.add_row({name, std::string(1, gender_code(g))});
  csv::write_file(dir + "/lexicon.csv", lex);
}

}  // namespace coauth
