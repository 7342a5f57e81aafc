#pragma once

// Reference implementations used only by tests. Each one takes a
// deliberately different route from the library code it checks.

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// Counts every subset (size <= max_size) of every transaction directly.
inline std::map<std::vector<std::string>, std::size_t> brute_force_itemsets(const std::vector<std::vector<std::string>>& db,
                                                                           std::optional<double> minsup,
                                                                           std::size_t max_size) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& t : db) {
    std::set<std::string> uniq(t.begin(), t.end());
    std::vector<std::string> items(uniq.begin(), uniq.end());
    const std::size_t k = items.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      std::vector<std::string> subset;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask & (std::size_t{1} << i)) subset.push_back(items[i]);
      }
      if (subset.size() <= max_size) ++counts[subset];
    }
  }
  std::map<std::vector<std::string>, std::size_t> out;
  for (const auto& [s, c] : counts) {
    if (!minsup || static_cast<double>(c) / static_cast<double>(db.size()) >= *minsup) out.emplace(s, c);
  }
  return out;
}

/// Pearson r in long double: explicit means, explicit deviations, then
/// sum / ((n-1) Sx Sy).
inline long double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  std::vector<long double> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = xs[i] - mx;
    dy[i] = ys[i] - my;
  }
  long double num = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += dx[i] * dy[i];
    vx += dx[i] * dx[i];
    vy += dy[i] * dy[i];
  }
  const long double sx = std::sqrt(vx / (n - 1));
  const long double sy = std::sqrt(vy / (n - 1));
  return num / ((n - 1) * sx * sy);
}

inline double entropy(const std::vector<std::size_t>& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  double e = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = c / total;
    e += -p * std::log(p) / std::log(2.0);
  }
  return e;
}

struct DensityReference {
  std::vector<bool> core;
  std::vector<bool> noise;
  std::vector<std::size_t> component;  // union-find root of each core point
};

/// Core flags by counting, core partition as connected components of the
/// core-core eps graph (union-find), noise as non-core points with no core
/// neighbour.
inline DensityReference density_reference(const std::vector<std::vector<double>>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  auto within = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t d = 0; d < pts[a].size(); ++d) {
      const double diff = pts[a][d] - pts[b][d];
      s += diff * diff;
    }
    return std::sqrt(s) <= eps;
  };
  DensityReference ref;
  ref.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += within(i, j) ? 1 : 0;
    ref.core[i] = count >= min_pts;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ref.core[i] && ref.core[j] && within(i, j)) parent[find(i)] = find(j);
    }
  }
  ref.component.resize(n);
  ref.noise.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    ref.component[i] = find(i);
    if (!ref.core[i]) {
      bool near_core = false;
      for (std::size_t j = 0; j < n && !near_core; ++j) near_core = ref.core[j] && within(i, j);
      ref.noise[i] = !near_core;
    }
  }
  return ref;
}

}  // namespace oracle
