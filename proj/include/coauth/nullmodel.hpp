#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coauth/diversity.hpp"
#include "coauth/graph.hpp"
#include "coauth/profiles.hpp"
#include "coauth/stats.hpp"

namespace coauth {

// Cochran finite-population sample size with p = 0.5:
//   n = ceil(N z^2 p(1-p) / (e^2 (N-1) + z^2 p(1-p)))
inline int cochran_sample_size(long long population, double confidence = 0.95,
                               double margin = 0.01) {
  if (population < 1) throw std::invalid_argument("cochran_sample_size: population must be >= 1");
  if (margin <= 0 || margin >= 1)
    throw std::invalid_argument("cochran_sample_size: margin must be in (0, 1)");
  if (confidence <= 0 || confidence >= 1)
    throw std::invalid_argument("cochran_sample_size: confidence must be in (0, 1)");
  const double z = stats::normal_quantile(0.5 + confidence / 2.0);
  const double pq = 0.25;
  const double num = static_cast<double>(population) * z * z * pq;
  const double den = margin * margin * static_cast<double>(population - 1) + z * z * pq;
  const long long n = static_cast<long long>(std::ceil(num / den));
  return static_cast<int>(std::min<long long>(n, population));
}

// Synthetic teams: `size` distinct authors drawn uniformly without
// replacement from the pool, independently per team. Members keep their real
// profiles and primary disciplines.
inline std::vector<TeamRecord> randomize_teams(const ProfileSet& pool, int size, int count,
                                               std::uint64_t seed) {
  const int n = static_cast<int>(pool.size());
  if (size < 1 || size > n)
    throw std::invalid_argument("randomize_teams: team size exceeds author pool");
  if (count < 1) throw std::invalid_argument("randomize_teams: count must be >= 1");
  Rng rng(seed);
  std::vector<TeamRecord> teams;
  teams.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    const auto chosen = rng.sample_without_replacement(n, size);
    TeamRecord team;
    team.pub_id = "null-" + std::to_string(size) + "-" + std::to_string(t);
    team.total_size = size;
    bool any_f = false, any_m = false;
    std::map<int, int> disciplines;
    for (int idx : chosen) {
      const auto& profile = pool.items[static_cast<std::size_t>(idx)];
      team.member_ids.push_back(profile.author_id);
      any_f |= (profile.gender == Gender::F);
      any_m |= (profile.gender == Gender::M);
      ++disciplines[profile.primary_discipline];
    }
    team.gender_class = any_f && any_m ? TeamGenderClass::mixed
                        : any_f        ? TeamGenderClass::female_only
                                       : TeamGenderClass::male_only;
    for (const auto& [disc, c] : disciplines)
      team.discipline_fractions.emplace_back(disc, static_cast<double>(c) / size);
    teams.push_back(std::move(team));
  }
  return teams;
}

struct SizeMoments {
  double mu_h = 0, sigma_h = 0;
  double mu_s = 0, sigma_s = 0;
  int sample_count = 0;
};

struct NullMoments {
  std::map<int, SizeMoments> by_size;
  // Present only when the null was built gender-stratified.
  std::map<std::pair<int, TeamGenderClass>, SizeMoments> by_size_and_class;

  bool stratified() const { return !by_size_and_class.empty(); }
};

namespace detail {

inline SizeMoments moments_of(const std::vector<TeamRecord>& teams, const ProfileSet& profiles,
                              int n_topics) {
  double sum_h = 0, sum_h2 = 0, sum_s = 0, sum_s2 = 0;
  std::size_t n_h = 0, n_s = 0;
  for (const auto& team : teams) {
    if (const auto h = team_entropy(team, n_topics)) {
      sum_h += *h;
      sum_h2 += *h * *h;
      ++n_h;
    }
    if (const auto s = team_cosine(team, profiles)) {
      sum_s += *s;
      sum_s2 += *s * *s;
      ++n_s;
    }
  }
  SizeMoments m;
  m.sample_count = static_cast<int>(teams.size());
  if (n_h > 0) {
    m.mu_h = sum_h / static_cast<double>(n_h);
    const double var = sum_h2 / static_cast<double>(n_h) - m.mu_h * m.mu_h;  // population
    m.sigma_h = var > 0 ? std::sqrt(var) : 0.0;
  }
  if (n_s > 0) {
    m.mu_s = sum_s / static_cast<double>(n_s);
    const double var = sum_s2 / static_cast<double>(n_s) - m.mu_s * m.mu_s;
    m.sigma_s = var > 0 ? std::sqrt(var) : 0.0;
  }
  return m;
}

}  // namespace detail

// Mean and population standard deviation of the team metrics over a batch
// of synthetic teams, keyed by team size.
inline NullMoments null_moments(const std::vector<TeamRecord>& synthetic,
                                const ProfileSet& profiles, int n_topics) {
  std::map<int, std::vector<TeamRecord>> by_size;
  for (const auto& team : synthetic) by_size[team.total_size].push_back(team);
  NullMoments moments;
  for (const auto& [size, teams] : by_size)
    moments.by_size[size] = detail::moments_of(teams, profiles, n_topics);
  return moments;
}

// The randomization protocol: for each unique real team size the population
// is the number of real teams of that size, the sample size comes from
// Cochran's formula, and that many synthetic teams are generated. Per-size
// RNG streams are derived as seed xor size so scheduling cannot reorder
// draws. With stratify_by_gender, single-gender classes sample from the
// matching gender's pool and mixed teams from the whole pool.
inline NullMoments build_null_moments(const std::vector<TeamRecord>& real_teams,
                                      const ProfileSet& profiles, int n_topics,
                                      double confidence = 0.95, double margin = 0.01,
                                      std::uint64_t seed = 0, bool stratify_by_gender = false) {
  NullMoments moments;
  if (!stratify_by_gender) {
    std::map<int, long long> population;
    for (const auto& team : real_teams) ++population[team.total_size];
    for (const auto& [size, n_real] : population) {
      if (size > static_cast<int>(profiles.size())) continue;  // cannot sample such a team
      const int count = cochran_sample_size(n_real, confidence, margin);
      const auto teams = randomize_teams(profiles, size, count,
                                         seed ^ static_cast<std::uint64_t>(size));
      moments.by_size[size] = detail::moments_of(teams, profiles, n_topics);
    }
    return moments;
  }

  ProfileSet female, male;
  {
    std::vector<AuthorProfile> f, m;
    for (const auto& p : profiles.items)
      (p.gender == Gender::F ? f : m).push_back(p);
    female = ProfileSet(std::move(f));
    male = ProfileSet(std::move(m));
  }
  std::map<std::pair<int, TeamGenderClass>, long long> population;
  for (const auto& team : real_teams) ++population[{team.total_size, team.gender_class}];
  for (const auto& [key, n_real] : population) {
    const auto [size, cls] = key;
    const ProfileSet& pool = cls == TeamGenderClass::female_only ? female
                             : cls == TeamGenderClass::male_only ? male
                                                                 : profiles;
    if (size > static_cast<int>(pool.size())) continue;
    const int count = cochran_sample_size(n_real, confidence, margin);
    const auto teams =
        randomize_teams(pool, size, count,
                        seed ^ static_cast<std::uint64_t>(size) ^
                            (static_cast<std::uint64_t>(cls) << 32));
    moments.by_size_and_class[key] = detail::moments_of(teams, profiles, n_topics);
  }
  return moments;
}

struct ZScoreRecord {
  std::string pub_id;
  TeamGenderClass gender_class = TeamGenderClass::mixed;
  std::optional<double> z_h;
  std::optional<double> z_s;
};

// Standardizes each real team's metrics against the matching null moments.
// Undefined (rather than infinite) when sigma is zero or the metric itself
// is excluded for the team.
inline std::vector<ZScoreRecord> z_scores(const std::vector<TeamRecord>& real_teams,
                                          const NullMoments& moments, const ProfileSet& profiles,
                                          int n_topics) {
  std::vector<ZScoreRecord> out;
  out.reserve(real_teams.size());
  for (const auto& team : real_teams) {
    const SizeMoments* m = nullptr;
    if (moments.stratified()) {
      const auto it = moments.by_size_and_class.find({team.total_size, team.gender_class});
      if (it != moments.by_size_and_class.end()) m = &it->second;
    } else {
      const auto it = moments.by_size.find(team.total_size);
      if (it != moments.by_size.end()) m = &it->second;
    }
    if (!m)
      throw std::runtime_error("z_scores: no null moments for team size " +
                               std::to_string(team.total_size));
    ZScoreRecord rec;
    rec.pub_id = team.pub_id;
    rec.gender_class = team.gender_class;
    if (const auto h = team_entropy(team, n_topics); h && m->sigma_h > 0)
      rec.z_h = (*h - m->mu_h) / m->sigma_h;
    if (const auto s = team_cosine(team, profiles); s && m->sigma_s > 0)
      rec.z_s = (*s - m->mu_s) / m->sigma_s;
    out.push_back(std::move(rec));
  }
  return out;
}

inline void write_zscores_csv(const std::vector<ZScoreRecord>& records, const std::string& path) {
  MetricTable table;
  table.columns = {"pub_id", "gender_class", "z_H", "z_S"};
  for (const auto& r : records)
    table.add_row({r.pub_id, team_class_name(r.gender_class),
                   r.z_h ? format_double(*r.z_h) : "", r.z_s ? format_double(*r.z_s) : ""});
  csv::write_file(path, table);
}

inline void write_null_moments_csv(const NullMoments& moments, const std::string& path) {
  MetricTable table;
  table.columns = {"size", "gender_class", "mu_H", "sigma_H", "mu_S", "sigma_S", "samples"};
  for (const auto& [size, m] : moments.by_size)
    table.add_row({std::to_string(size), "all", format_double(m.mu_h), format_double(m.sigma_h),
                   format_double(m.mu_s), format_double(m.sigma_s),
                   std::to_string(m.sample_count)});
  for (const auto& [key, m] : moments.by_size_and_class)
    table.add_row({std::to_string(key.first), team_class_name(key.second),
                   format_double(m.mu_h), format_double(m.sigma_h), format_double(m.mu_s),
                   format_double(m.sigma_s), std::to_string(m.sample_count)});
  csv::write_file(path, table);
}

}  // namespace coauth
