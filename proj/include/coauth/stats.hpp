#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <json.hpp>

#include "coauth/random.hpp"

namespace coauth {
namespace stats {

enum class Alternative { two_sided, greater, less };

inline const char* alternative_name(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    default: return "less";
  }
}

struct TestResult {
  std::string test;
  double statistic = 0;
  double p_value = 1;
  Alternative alternative = Alternative::two_sided;
  bool exact = false;
  std::size_t n_a = 0, n_b = 0;
  double mean_a = 0, mean_b = 0;
  double median_a = 0, median_b = 0;
};

inline double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

// Midpoint convention for even n.
inline double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double normal_sf(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

inline double normal_quantile(double p) {
  boost::math::normal_distribution<double> dist;
  return boost::math::quantile(dist, p);
}

namespace detail {

// Midranks over the pooled sample; also returns sum_t (t^3 - t) over tie
// groups for the variance correction.
inline std::pair<std::vector<double>, double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  double tie_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  return {ranks, tie_sum};
}

// Null distribution of the Mann-Whitney U statistic for sample sizes (n, m)
// without ties: count[u] = number of n-subsets of ranks with U = u.
// Classic two-way recurrence; doubles hold the counts exactly at these sizes.
inline std::vector<double> u_distribution(std::size_t n, std::size_t m) {
  // Standard recursion f(n, m, u) = f(n-1, m, u-m) + f(n, m-1, u), split on
  // whether the largest pooled rank belongs to sample a or sample b.
  const auto key = [&](std::size_t a, std::size_t b) { return a * (m + 1) + b; };
  std::vector<std::vector<double>> memo((n + 1) * (m + 1));
  std::vector<bool> done((n + 1) * (m + 1), false);
  const std::function<const std::vector<double>&(std::size_t, std::size_t)> count =
      [&](std::size_t a, std::size_t b) -> const std::vector<double>& {
    auto& slot = memo[key(a, b)];
    if (done[key(a, b)]) return slot;
    done[key(a, b)] = true;
    slot.assign(a * b + 1, 0.0);
    if (a == 0 || b == 0) {
      slot[0] = 1.0;
      return slot;
    }
    const auto& first = count(a - 1, b);   // largest element in sample a: adds b to U
    const auto& second = count(a, b - 1);  // largest element in sample b
    for (std::size_t u = 0; u <= a * b; ++u) {
      double c = 0;
      if (u >= b && u - b < first.size()) c += first[u - b];
      if (u < second.size()) c += second[u];
      slot[u] = c;
    }
    return slot;
  };
  return count(n, m);
}

}  // namespace detail

// Mann-Whitney U with midrank tie handling. Exact tail probabilities by
// enumeration of the rank distribution when n+m <= 20 and the pooled sample
// is tie-free; otherwise the normal approximation with tie and continuity
// corrections. Reported statistic is U_a.
inline TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                                 Alternative alternative = Alternative::two_sided) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> pooled;
  pooled.reserve(n + m);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto [ranks, tie_sum] = detail::midranks(pooled);
  double rank_a = 0;
  for (std::size_t i = 0; i < n; ++i) rank_a += ranks[i];
  const double u_a = rank_a - static_cast<double>(n) * (static_cast<double>(n) + 1) / 2.0;
  const double nm = static_cast<double>(n) * static_cast<double>(m);

  TestResult result;
  result.test = "mann_whitney_u";
  result.statistic = u_a;
  result.alternative = alternative;
  result.n_a = n;
  result.n_b = m;
  result.mean_a = mean_of(a);
  result.mean_b = mean_of(b);
  result.median_a = median_of(a);
  result.median_b = median_of(b);

  const bool no_ties = tie_sum == 0;
  if (n + m <= 20 && no_ties) {
    result.exact = true;
    const auto dist = detail::u_distribution(n, m);
    double total = 0;
    for (double c : dist) total += c;
    const auto tail_le = [&](double u) {
      double s = 0;
      for (std::size_t i = 0; i < dist.size(); ++i)
        if (static_cast<double>(i) <= u + 1e-12) s += dist[i];
      return s / total;
    };
    const auto tail_ge = [&](double u) {
      double s = 0;
      for (std::size_t i = 0; i < dist.size(); ++i)
        if (static_cast<double>(i) >= u - 1e-12) s += dist[i];
      return s / total;
    };
    switch (alternative) {
      case Alternative::greater: result.p_value = tail_ge(u_a); break;
      case Alternative::less: result.p_value = tail_le(u_a); break;
      case Alternative::two_sided: {
        // P(|U - nm/2| >= |u_a - nm/2|); U's null distribution is symmetric.
        const double dev = std::abs(u_a - nm / 2.0);
        result.p_value = std::min(1.0, tail_ge(nm / 2.0 + dev) + tail_le(nm / 2.0 - dev));
        break;
      }
    }
    return result;
  }

  const double big_n = static_cast<double>(n + m);
  const double mu = nm / 2.0;
  double var = nm / 12.0 * (big_n + 1.0 - tie_sum / (big_n * (big_n - 1.0)));
  if (var < 0) var = 0;
  const double sd = std::sqrt(var);
  if (sd == 0) {
    result.p_value = 1.0;
    return result;
  }
  switch (alternative) {
    case Alternative::greater: result.p_value = normal_sf((u_a - mu - 0.5) / sd); break;
    case Alternative::less: result.p_value = normal_sf((mu - u_a - 0.5) / sd); break;
    case Alternative::two_sided: {
      double dev = std::abs(u_a - mu) - 0.5;
      if (dev < 0) dev = 0;
      result.p_value = std::min(1.0, 2.0 * normal_sf(dev / sd));
      break;
    }
  }
  return result;
}

enum class PermStatistic { median_diff, mean_diff };

namespace detail {

inline double group_statistic(PermStatistic stat, const std::vector<double>& a,
                              const std::vector<double>& b) {
  return stat == PermStatistic::median_diff ? median_of(a) - median_of(b)
                                            : mean_of(a) - mean_of(b);
}

inline double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double c = 1;
  for (std::size_t i = 0; i < k; ++i)
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

}  // namespace detail

// Two-sample permutation test for a difference in medians or means. When the
// number of distinct group assignments fits in `rounds`, every assignment is
// enumerated and the p-value is a census, independent of the seed; otherwise
// Monte-Carlo with the +1/+1 correction so p never reaches zero.
inline TestResult permutation_test(const std::vector<double>& a, const std::vector<double>& b,
                                   PermStatistic statistic, int rounds, Alternative alternative,
                                   std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("permutation_test: rounds must be >= 1");
  if (a.empty() || b.empty()) throw std::invalid_argument("permutation_test: empty sample");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> pooled;
  pooled.reserve(n + m);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  TestResult result;
  result.test = statistic == PermStatistic::median_diff ? "permutation_median_diff"
                                                        : "permutation_mean_diff";
  result.alternative = alternative;
  result.n_a = n;
  result.n_b = m;
  result.mean_a = mean_of(a);
  result.mean_b = mean_of(b);
  result.median_a = median_of(a);
  result.median_b = median_of(b);
  const double observed = detail::group_statistic(statistic, a, b);
  result.statistic = observed;

  const auto is_extreme = [&](double s) {
    constexpr double eps = 1e-12;
    switch (alternative) {
      case Alternative::greater: return s >= observed - eps;
      case Alternative::less: return s <= observed + eps;
      default: return std::abs(s) >= std::abs(observed) - eps;
    }
  };

  const double arrangements = detail::binomial_coefficient(n + m, n);
  if (arrangements <= static_cast<double>(rounds)) {
    // Exhaustive: iterate every n-subset of the pooled values as group a.
    result.exact = true;
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    std::size_t extreme = 0, total = 0;
    std::vector<double> ga(n), gb(m);
    while (true) {
      std::size_t ai = 0, bi = 0;
      std::size_t next_pick = 0;
      for (std::size_t i = 0; i < n + m; ++i) {
        if (next_pick < n && pick[next_pick] == i) {
          ga[ai++] = pooled[i];
          ++next_pick;
        } else {
          gb[bi++] = pooled[i];
        }
      }
      if (is_extreme(detail::group_statistic(statistic, ga, gb))) ++extreme;
      ++total;
      // next combination
      std::size_t k = n;
      while (k > 0 && pick[k - 1] == n + m - (n - k + 1)) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t j = k; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    result.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    return result;
  }

  Rng rng(seed);
  std::vector<double> shuffled = pooled;
  std::size_t extreme = 0;
  std::vector<double> ga(n), gb(m);
  for (int r = 0; r < rounds; ++r) {
    rng.shuffle(shuffled);
    std::copy(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n), ga.begin());
    std::copy(shuffled.begin() + static_cast<std::ptrdiff_t>(n), shuffled.end(), gb.begin());
    if (is_extreme(detail::group_statistic(statistic, ga, gb))) ++extreme;
  }
  result.p_value = (1.0 + static_cast<double>(extreme)) / (static_cast<double>(rounds) + 1.0);
  return result;
}

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom. Both samples degenerate and equal means gives p = 1 by
// convention.
inline TestResult t_test_welch(const std::vector<double>& a, const std::vector<double>& b,
                               Alternative alternative = Alternative::two_sided) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("t_test_welch: each sample needs at least two values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a), mb = mean_of(b);
  double va = 0, vb = 0;
  for (double x : a) va += (x - ma) * (x - ma);
  for (double x : b) vb += (x - mb) * (x - mb);
  va /= na - 1;
  vb /= nb - 1;

  TestResult result;
  result.test = "t_test_welch";
  result.alternative = alternative;
  result.n_a = a.size();
  result.n_b = b.size();
  result.mean_a = ma;
  result.mean_b = mb;
  result.median_a = median_of(a);
  result.median_b = median_of(b);

  const double se2 = va / na + vb / nb;
  if (se2 == 0) {
    if (ma == mb) {
      result.p_value = 1.0;
      return result;
    }
    result.statistic = ma > mb ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    switch (alternative) {
      case Alternative::greater: result.p_value = ma > mb ? 0.0 : 1.0; break;
      case Alternative::less: result.p_value = ma < mb ? 0.0 : 1.0; break;
      default: result.p_value = 0.0; break;
    }
    return result;
  }
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 /
                    (va * va / (na * na * (na - 1)) + vb * vb / (nb * nb * (nb - 1)));
  result.statistic = t;
  boost::math::students_t_distribution<double> dist(df);
  const double cdf = boost::math::cdf(dist, t);
  switch (alternative) {
    case Alternative::greater: result.p_value = 1.0 - cdf; break;
    case Alternative::less: result.p_value = cdf; break;
    default: result.p_value = 2.0 * std::min(cdf, 1.0 - cdf); break;
  }
  return result;
}

struct GroupSummaryRow {
  std::string group;
  std::size_t n = 0;
  double mean = 0, median = 0, sd = 0;
};

inline std::vector<GroupSummaryRow> group_summary(
    const std::map<std::string, std::vector<double>>& groups) {
  std::vector<GroupSummaryRow> rows;
  for (const auto& [name, xs] : groups) {
    GroupSummaryRow row;
    row.group = name;
    row.n = xs.size();
    if (!xs.empty()) {
      row.mean = mean_of(xs);
      row.median = median_of(xs);
      double var = 0;
      for (double x : xs) var += (x - row.mean) * (x - row.mean);
      row.sd = xs.size() > 1 ? std::sqrt(var / (static_cast<double>(xs.size()) - 1)) : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const TestResult& r, const std::string& groups) {
  return {{"test", r.test},
          {"groups", groups},
          {"statistic", r.statistic},
          {"p", r.p_value},
          {"alternative", alternative_name(r.alternative)},
          {"exact", r.exact},
          {"n_a", r.n_a},
          {"n_b", r.n_b},
          {"mean_a", r.mean_a},
          {"mean_b", r.mean_b},
          {"median_a", r.median_a},
          {"median_b", r.median_b}};
}

}  // namespace stats
}  // namespace coauth
