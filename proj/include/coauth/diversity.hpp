#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "coauth/graph.hpp"
#include "coauth/profiles.hpp"

namespace coauth {

// Normalized Shannon entropy of the author's disciplinary profile restricted
// to active fields (entries above the profile's activity threshold) and
// renormalized, divided by log(n_d). Authors active in a single field carry
// no diversity signal and are excluded (nullopt).
inline std::optional<double> author_entropy(const AuthorProfile& profile) {
  std::vector<double> active;
  for (double v : profile.topic_vector)
    if (v > profile.activity_threshold) active.push_back(v);
  const int n_d = static_cast<int>(active.size());
  if (n_d <= 1) return std::nullopt;
  double mass = 0;
  for (double v : active) mass += v;
  double h = 0;
  for (double v : active) {
    const double p = v / mass;
    if (p > 0) h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(n_d));
}

// Cosine similarity of two disciplinary profiles, clamped into [0, 1]
// against rounding. Nonnegative vectors cannot legitimately go negative.
inline double pair_cosine(std::span<const double> xi, std::span<const double> xj) {
  if (xi.size() != xj.size()) throw std::invalid_argument("pair_cosine: dimension mismatch");
  double dot = 0, ni = 0, nj = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    dot += xi[k] * xj[k];
    ni += xi[k] * xi[k];
    nj += xj[k] * xj[k];
  }
  if (ni == 0 || nj == 0) throw std::domain_error("pair_cosine: zero-norm vector");
  const double s = dot / std::sqrt(ni * nj);
  return s < 0 ? 0.0 : (s > 1 ? 1.0 : s);
}

inline double pair_cosine(const AuthorProfile& a, const AuthorProfile& b) {
  return pair_cosine(std::span<const double>(a.topic_vector),
                     std::span<const double>(b.topic_vector));
}

// Within-group entropy over members' primary disciplines, normalized by
// log(min{|p|, N_d}). A team whose members share one discipline scores 0
// (the 0/0 limit); teams with fewer than two profiled members are excluded.
// N_d is the global topic count; per_team_fields switches the normalizer to
// the number of distinct disciplines within the team.
inline std::optional<double> team_entropy(const TeamRecord& team, int n_topics_global,
                                          bool per_team_fields = false) {
  if (team.member_ids.size() < 2) return std::nullopt;
  if (team.discipline_fractions.size() <= 1) return 0.0;
  double h = 0;
  for (const auto& [disc, f] : team.discipline_fractions)
    if (f > 0) h -= f * std::log(f);
  const int n_d = per_team_fields ? static_cast<int>(team.discipline_fractions.size())
                                  : n_topics_global;
  const int bound = std::min(team.total_size, n_d);
  if (bound <= 1) return 0.0;
  return h / std::log(static_cast<double>(bound));
}

// Mean pairwise cosine over the team's profiled members; one or zero
// profiled members leave no pairs, hence exclusion.
inline std::optional<double> team_cosine(const TeamRecord& team, const ProfileSet& profiles) {
  std::vector<const AuthorProfile*> members;
  for (const auto& id : team.member_ids) {
    const AuthorProfile* p = profiles.find(id);
    if (p) members.push_back(p);
  }
  const std::size_t m = members.size();
  if (m < 2) return std::nullopt;
  double sum = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) sum += pair_cosine(*members[i], *members[j]);
  const double value = 2.0 * sum / (static_cast<double>(m) * static_cast<double>(m - 1));
  return value < 0 ? 0.0 : (value > 1 ? 1.0 : value);
}

}  // namespace coauth
