#pragma once

#include <algorithm>
#include <array>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/profiles.hpp"
#include "coauth/table.hpp"

namespace coauth {

enum class EdgeType { FF, FM, MM };

inline const char* edge_type_name(EdgeType t) {
  switch (t) {
    case EdgeType::FF: return "FF";
    case EdgeType::FM: return "FM";
    default: return "MM";
  }
}

inline EdgeType edge_type_of(Gender a, Gender b) {
  if (a == Gender::F && b == Gender::F) return EdgeType::FF;
  if (a == Gender::M && b == Gender::M) return EdgeType::MM;
  return EdgeType::FM;
}

struct GraphNode {
  std::string author_id;
  Gender gender = Gender::U;
};

struct GraphEdge {
  int u = 0, v = 0;  // node indices, u < v
  int weight = 1;    // joint publications
  EdgeType type = EdgeType::MM;
};

struct CollabGraph {
  std::vector<GraphNode> nodes;  // sorted by author_id
  std::vector<GraphEdge> edges;  // sorted by (u, v)
  std::unordered_map<std::string, int> index;

  int node_count() const { return static_cast<int>(nodes.size()); }

  int node_index(const std::string& author_id) const {
    const auto it = index.find(author_id);
    return it == index.end() ? -1 : it->second;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& e : edges) {
      adj[static_cast<std::size_t>(e.u)].push_back(e.v);
      adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    return adj;
  }
};

// Monopartite projection: nodes are the gendered (non-U) authors; each
// publication contributes one weight unit to every unordered pair of its
// gendered authors.
inline CollabGraph project(const std::vector<PublicationRecord>& corpus) {
  CollabGraph g;
  std::map<std::string, Gender> authors;  // ordered => node ids sorted
  for (const auto& rec : corpus)
    for (const auto& a : rec.authors)
      if (a.gender != Gender::U) authors.emplace(a.author_id, a.gender);
  g.nodes.reserve(authors.size());
  for (const auto& [id, gender] : authors) {
    g.index[id] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({id, gender});
  }

  std::map<std::pair<int, int>, int> weights;
  for (const auto& rec : corpus) {
    std::vector<int> members;
    for (const auto& a : rec.authors)
      if (a.gender != Gender::U) members.push_back(g.index.at(a.author_id));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        ++weights[{members[i], members[j]}];
  }
  g.edges.reserve(weights.size());
  for (const auto& [pair, w] : weights) {
    const auto [u, v] = pair;
    g.edges.push_back({u, v, w,
                       edge_type_of(g.nodes[static_cast<std::size_t>(u)].gender,
                                    g.nodes[static_cast<std::size_t>(v)].gender)});
  }
  return g;
}

enum class TeamGenderClass { female_only, male_only, mixed };

inline const char* team_class_name(TeamGenderClass c) {
  switch (c) {
    case TeamGenderClass::female_only: return "female_only";
    case TeamGenderClass::male_only: return "male_only";
    default: return "mixed";
  }
}

struct TeamRecord {
  std::string pub_id;
  std::vector<std::string> member_ids;  // gendered authors with profiles
  int total_size = 0;                   // |p|; counts U authors by default
  TeamGenderClass gender_class = TeamGenderClass::mixed;
  std::vector<std::pair<int, double>> discipline_fractions;  // (discipline, f_pd), sorted
};

struct TeamExtraction {
  std::vector<TeamRecord> teams;
  std::vector<std::string> skipped;  // pubs whose gendered authors lack profiles
};

// One team per publication. Discipline fractions come from the profiled
// members' primary disciplines; |p| is the full byline size unless
// count_unknown_in_size is cleared.
inline TeamExtraction extract_teams(const std::vector<PublicationRecord>& corpus,
                                    const ProfileSet& profiles,
                                    bool count_unknown_in_size = true) {
  TeamExtraction result;
  for (const auto& rec : corpus) {
    TeamRecord team;
    team.pub_id = rec.pub_id;
    bool missing_profile = false;
    int gendered = 0;
    bool any_f = false, any_m = false;
    std::map<int, int> discipline_counts;
    std::vector<std::string> members;
    for (const auto& a : rec.authors) {
      if (a.gender == Gender::U) continue;
      if (std::find(members.begin(), members.end(), a.author_id) != members.end()) continue;
      ++gendered;
      const AuthorProfile* p = profiles.find(a.author_id);
      if (!p) {
        missing_profile = true;
        break;
      }
      members.push_back(a.author_id);
      any_f |= (a.gender == Gender::F);
      any_m |= (a.gender == Gender::M);
      ++discipline_counts[p->primary_discipline];
    }
    if (missing_profile) {
      result.skipped.push_back(rec.pub_id);
      continue;
    }
    team.member_ids = std::move(members);
    team.total_size = count_unknown_in_size ? static_cast<int>(rec.authors.size()) : gendered;
    team.gender_class = any_f && any_m   ? TeamGenderClass::mixed
                        : any_f          ? TeamGenderClass::female_only
                                         : TeamGenderClass::male_only;
    const double m = static_cast<double>(team.member_ids.size());
    for (const auto& [disc, count] : discipline_counts)
      team.discipline_fractions.emplace_back(disc, static_cast<double>(count) / m);
    result.teams.push_back(std::move(team));
  }
  if (!result.skipped.empty())
    std::cerr << "extract_teams: skipped " << result.skipped.size()
              << " publication(s) whose authors lack profiles\n";
  return result;
}

// Per-gender per-year mean number of distinct co-authors per paper plus the
// mean byline size. Years with no papers are simply absent.
inline MetricTable degree_stats(const std::vector<PublicationRecord>& corpus) {
  struct Cell {
    double coauthor_sum = 0;
    std::size_t incidences = 0;
  };
  std::map<int, std::map<char, Cell>> per_year;
  std::map<int, std::pair<double, std::size_t>> team_size;  // year -> (sum, papers)
  for (const auto& rec : corpus) {
    const std::size_t byline = rec.authors.size();
    auto& ts = team_size[rec.year];
    ts.first += static_cast<double>(byline);
    ts.second += 1;
    for (const auto& a : rec.authors) {
      if (a.gender == Gender::U) continue;
      std::set<std::string> others;
      for (const auto& other : rec.authors)
        if (other.author_id != a.author_id) others.insert(other.author_id);
      auto& cell = per_year[rec.year][gender_code(a.gender)];
      cell.coauthor_sum += static_cast<double>(others.size());
      cell.incidences += 1;
    }
  }
  MetricTable table;
  table.columns = {"year", "gender", "avg_distinct_coauthors", "avg_team_size", "paper_author_incidences"};
  for (const auto& [year, by_gender] : per_year) {
    const auto& ts = team_size.at(year);
    const double avg_team = ts.first / static_cast<double>(ts.second);
    for (const auto& [gender, cell] : by_gender) {
      table.add_row({std::to_string(year), std::string(1, gender),
                     format_double(cell.coauthor_sum / static_cast<double>(cell.incidences)),
                     format_double(avg_team), std::to_string(cell.incidences)});
    }
  }
  return table;
}

// Yearly share of FF/FM/MM collaboration pairs, from each year's papers.
inline MetricTable edge_type_shares(const std::vector<PublicationRecord>& corpus) {
  std::map<int, std::array<std::size_t, 3>> counts;
  for (const auto& rec : corpus) {
    std::vector<const AuthorRef*> gendered;
    for (const auto& a : rec.authors)
      if (a.gender != Gender::U) gendered.push_back(&a);
    auto& c = counts[rec.year];
    for (std::size_t i = 0; i < gendered.size(); ++i)
      for (std::size_t j = i + 1; j < gendered.size(); ++j)
        ++c[static_cast<std::size_t>(edge_type_of(gendered[i]->gender, gendered[j]->gender))];
  }
  MetricTable table;
  table.columns = {"year", "ff_pct", "fm_pct", "mm_pct", "pairs"};
  for (const auto& [year, c] : counts) {
    const double total = static_cast<double>(c[0] + c[1] + c[2]);
    if (total == 0) continue;
    table.add_row({std::to_string(year), format_double(100.0 * c[0] / total),
                   format_double(100.0 * c[1] / total), format_double(100.0 * c[2] / total),
                   std::to_string(c[0] + c[1] + c[2])});
  }
  return table;
}

inline void write_edges_csv(const CollabGraph& g, const std::string& path) {
  MetricTable table;
  table.columns = {"src", "dst", "weight", "type"};
  for (const auto& e : g.edges)
    table.add_row({g.nodes[static_cast<std::size_t>(e.u)].author_id,
                   g.nodes[static_cast<std::size_t>(e.v)].author_id, std::to_string(e.weight),
                   edge_type_name(e.type)});
  csv::write_file(path, table);
}

inline void write_nodes_csv(const CollabGraph& g, const std::string& path) {
  MetricTable table;
  table.columns = {"author_id", "gender"};
  for (const auto& n : g.nodes)
    table.add_row({n.author_id, std::string(1, gender_code(n.gender))});
  csv::write_file(path, table);
}

inline void write_teams_csv(const std::vector<TeamRecord>& teams, const std::string& path) {
  MetricTable table;
  table.columns = {"pub_id", "size", "gender_class", "members"};
  for (const auto& t : teams) {
    std::string members;
    for (std::size_t i = 0; i < t.member_ids.size(); ++i) {
      if (i) members += ';';
      members += t.member_ids[i];
    }
    table.add_row({t.pub_id, std::to_string(t.total_size), team_class_name(t.gender_class),
                   std::move(members)});
  }
  csv::write_file(path, table);
}

}  // namespace coauth
