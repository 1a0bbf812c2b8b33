#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/graph.hpp"
#include "coauth/indicators.hpp"
#include "coauth/random.hpp"
#include "coauth/table.hpp"

namespace coauth {

struct CentralityResult {
  enum class Method { exact, sampled };
  Method method = Method::exact;
  int sample_sources = 0;   // sampled only
  std::uint64_t seed = 0;   // sampled only
  std::vector<double> bc;   // per node index, normalized into [0, 1]
};

namespace detail {

// Brandes dependency accumulation from one source over the unweighted
// graph; adds raw (ordered-pair) dependencies into acc.
inline void brandes_from_source(const std::vector<std::vector<int>>& adj, int source,
                                std::vector<double>& acc, std::vector<int>& dist,
                                std::vector<double>& sigma, std::vector<double>& delta,
                                std::vector<std::vector<int>>& preds, std::vector<int>& order) {
  const int n = static_cast<int>(adj.size());
  dist.assign(static_cast<std::size_t>(n), -1);
  sigma.assign(static_cast<std::size_t>(n), 0.0);
  delta.assign(static_cast<std::size_t>(n), 0.0);
  for (auto& p : preds) p.clear();
  order.clear();

  dist[static_cast<std::size_t>(source)] = 0;
  sigma[static_cast<std::size_t>(source)] = 1.0;
  std::queue<int> frontier;
  frontier.push(source);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    order.push_back(v);
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push(w);
      }
      if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(v)] + 1) {
        sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
        preds[static_cast<std::size_t>(w)].push_back(v);
      }
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int w = *it;
    for (int v : preds[static_cast<std::size_t>(w)])
      delta[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(v)] /
                                            sigma[static_cast<std::size_t>(w)] *
                                            (1.0 + delta[static_cast<std::size_t>(w)]);
    if (w != source) acc[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
  }
}

// Accumulates over the given sources. Sources are cut into fixed-size blocks
// and block partials are reduced in block order, so sums are bit-identical
// for any thread count.
inline std::vector<double> brandes_accumulate(const CollabGraph& graph,
                                              const std::vector<int>& sources, int threads) {
  const std::size_t n = graph.nodes.size();
  const auto adj = graph.adjacency();
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (sources.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partials(n_blocks);

  const auto run_block = [&](std::size_t b) {
    std::vector<double> acc(n, 0.0);
    std::vector<int> dist, order;
    std::vector<double> sigma, delta;
    std::vector<std::vector<int>> preds(n);
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(sources.size(), lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i)
      brandes_from_source(adj, sources[i], acc, dist, sigma, delta, preds, order);
    partials[b] = std::move(acc);
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n_blocks)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&]() {
        for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<double> total(n, 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t i = 0; i < n; ++i) total[i] += partials[b][i];
  return total;
}

}  // namespace detail

// Exact betweenness on the unweighted undirected graph, normalized by
// (n-1)(n-2)/2 over the whole node count; graphs with fewer than three
// nodes have no interior pairs and score all zeros.
inline CentralityResult betweenness_exact(const CollabGraph& graph, int threads = 1) {
  CentralityResult result;
  result.method = CentralityResult::Method::exact;
  const int n = graph.node_count();
  result.bc.assign(static_cast<std::size_t>(n), 0.0);
  if (n < 3) return result;
  std::vector<int> sources(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sources[static_cast<std::size_t>(i)] = i;
  const auto raw = detail::brandes_accumulate(graph, sources, threads);
  // raw counts ordered pairs; unordered normalizer (n-1)(n-2)/2 gives /((n-1)(n-2)).
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (int i = 0; i < n; ++i)
    result.bc[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)] * scale;
  return result;
}

// Unbiased source-sampled estimator: Brandes over k uniformly chosen
// sources, rescaled by n/k. k = n reproduces the exact result bit for bit.
inline CentralityResult betweenness_sampled(const CollabGraph& graph, int sources,
                                            std::uint64_t seed, int threads = 1) {
  const int n = graph.node_count();
  if (sources < 1 || sources > n)
    throw std::invalid_argument("betweenness_sampled: source count must be in [1, n]");
  CentralityResult result;
  result.method = CentralityResult::Method::sampled;
  result.sample_sources = sources;
  result.seed = seed;
  result.bc.assign(static_cast<std::size_t>(n), 0.0);
  if (n < 3) return result;
  Rng rng(seed);
  const auto chosen = rng.sample_without_replacement(n, sources);  // ascending
  const auto raw = detail::brandes_accumulate(graph, chosen, threads);
  const double rescale = static_cast<double>(n) / static_cast<double>(sources);
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (int i = 0; i < n; ++i)
    result.bc[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)] * rescale * scale;
  return result;
}

struct CorePartition {
  std::vector<std::string> core;       // top fraction by bc
  std::vector<std::string> periphery;  // remainder
  double fraction = 0.05;
};

namespace detail {

// Node indices ordered by descending bc, ties by ascending author_id.
inline std::vector<int> rank_by_centrality(const CollabGraph& graph,
                                           const CentralityResult& result) {
  std::vector<int> order(graph.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ba = result.bc[static_cast<std::size_t>(a)];
    const double bb = result.bc[static_cast<std::size_t>(b)];
    if (ba != bb) return ba > bb;
    return graph.nodes[static_cast<std::size_t>(a)].author_id <
           graph.nodes[static_cast<std::size_t>(b)].author_id;
  });
  return order;
}

}  // namespace detail

// Core = ceil(fraction * n) highest-betweenness researchers.
inline CorePartition core_periphery(const CollabGraph& graph, const CentralityResult& result,
                                    double fraction = 0.05) {
  if (fraction <= 0 || fraction >= 1)
    throw std::invalid_argument("core_periphery: fraction must be in (0, 1)");
  CorePartition part;
  part.fraction = fraction;
  const int n = graph.node_count();
  const auto order = detail::rank_by_centrality(graph, result);
  const std::size_t core_size =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& id = graph.nodes[static_cast<std::size_t>(order[i])].author_id;
    (i < core_size ? part.core : part.periphery).push_back(id);
  }
  return part;
}

struct SubnetworkResult {
  CollabGraph subgraph;         // induced on the top-fraction nodes
  MetricTable gender_summary;   // per-gender mean and 95% CI of the indicators
};

// Induced subgraph on the ceil(fraction*n) most central nodes plus a
// per-gender summary (degree within the subnetwork, publications, h-index,
// i10-index; mean with normal-approximation 95% confidence interval).
inline SubnetworkResult top_subnetwork(const CollabGraph& graph, const CentralityResult& result,
                                       double fraction,
                                       const std::vector<PublicationRecord>& corpus) {
  if (fraction <= 0 || fraction > 1)
    throw std::invalid_argument("top_subnetwork: fraction must be in (0, 1]");
  const int n = graph.node_count();
  const auto order = detail::rank_by_centrality(graph, result);
  const std::size_t top_size = std::min<std::size_t>(
      graph.nodes.size(),
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));

  std::vector<bool> keep(graph.nodes.size(), false);
  for (std::size_t i = 0; i < top_size; ++i) keep[static_cast<std::size_t>(order[i])] = true;

  SubnetworkResult out;
  std::vector<int> remap(graph.nodes.size(), -1);
  for (const auto& node : graph.nodes) {
    const int old_idx = graph.node_index(node.author_id);
    if (!keep[static_cast<std::size_t>(old_idx)]) continue;
    remap[static_cast<std::size_t>(old_idx)] = out.subgraph.node_count();
    out.subgraph.index[node.author_id] = out.subgraph.node_count();
    out.subgraph.nodes.push_back(node);
  }
  for (const auto& e : graph.edges) {
    if (!keep[static_cast<std::size_t>(e.u)] || !keep[static_cast<std::size_t>(e.v)]) continue;
    GraphEdge copy = e;
    copy.u = remap[static_cast<std::size_t>(e.u)];
    copy.v = remap[static_cast<std::size_t>(e.v)];
    out.subgraph.edges.push_back(copy);
  }

  // Indicators per member author.
  std::vector<int> degree(out.subgraph.nodes.size(), 0);
  for (const auto& e : out.subgraph.edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  std::unordered_map<std::string, std::vector<int>> citations;
  for (const auto& rec : corpus)
    for (const auto& a : rec.authors)
      if (out.subgraph.index.count(a.author_id))
        citations[a.author_id].push_back(rec.citation_count);

  struct Series {
    std::vector<double> degree, pubs, h, i10;
  };
  std::map<char, Series> by_gender;
  for (std::size_t i = 0; i < out.subgraph.nodes.size(); ++i) {
    const auto& node = out.subgraph.nodes[i];
    auto& s = by_gender[gender_code(node.gender)];
    const auto it = citations.find(node.author_id);
    const std::vector<int> cites = it == citations.end() ? std::vector<int>{} : it->second;
    const auto [h, i10] = h_and_i10(cites);
    s.degree.push_back(static_cast<double>(degree[i]));
    s.pubs.push_back(static_cast<double>(cites.size()));
    s.h.push_back(static_cast<double>(h));
    s.i10.push_back(static_cast<double>(i10));
  }

  out.gender_summary.columns = {"gender", "metric", "n", "mean", "ci95_lo", "ci95_hi"};
  const auto add_metric = [&](char g, const char* name, const std::vector<double>& xs) {
    const double n_obs = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean = n_obs > 0 ? mean / n_obs : 0;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double se = n_obs > 1 ? std::sqrt(var / (n_obs - 1) / n_obs) : 0;
    const double half = 1.959963984540054 * se;
    out.gender_summary.add_row({std::string(1, g), name, std::to_string(xs.size()),
                                format_double(mean), format_double(mean - half),
                                format_double(mean + half)});
  };
  for (const auto& [g, s] : by_gender) {
    add_metric(g, "degree", s.degree);
    add_metric(g, "publications", s.pubs);
    add_metric(g, "h_index", s.h);
    add_metric(g, "i10_index", s.i10);
  }
  return out;
}

inline void write_centrality_csv(const CollabGraph& graph, const CentralityResult& result,
                                 const CorePartition& part, const std::string& path) {
  std::unordered_set<std::string> core_ids(part.core.begin(), part.core.end());
  MetricTable table;
  table.columns = {"author_id", "bc", "role"};
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& id = graph.nodes[i].author_id;
    table.add_row({id, format_double(result.bc[i]), core_ids.count(id) ? "core" : "periphery"});
  }
  csv::write_file(path, table);
}

}  // namespace coauth
