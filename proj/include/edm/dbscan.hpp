#pragma once

// DBSCAN over small point sets with exact O(n^2) neighbourhoods.
//
// Roles: CORE iff |N_eps(p)| >= min_pts (p counts itself); BORDER is a
// non-core point within eps of a core; NOISE otherwise. Points are scanned in
// id order (IdLess), so cluster numbering and the cluster a shared border point
// joins are reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/ids.hpp"

namespace edm::dbscan {

struct Point {
  std::string id;
  std::vector<double> coords;
};

struct Params {
  double eps = 0.1;
  std::size_t min_pts = 4;
  bool normalize = false;

  void validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidArgument, "eps must be finite and > 0");
    if (min_pts < 1) throw Error(ErrorCode::InvalidArgument, "min_pts must be >= 1");
  }
};

enum class Role { Core, Border, Noise };

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Core: return "CORE";
    case Role::Border: return "BORDER";
    case Role::Noise: return "NOISE";
  }
  return "NOISE";
}

struct Label {
  Role role = Role::Noise;
  std::optional<int> cluster;  // 1..k, absent for noise
};

/// Labels are parallel to the input points.
struct ClusterAssignment {
  std::vector<Label> labels;
  int cluster_count = 0;
};

inline double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace detail {

inline void check_points(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "no points");
  const auto dim = points.front().coords.size();
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "points need at least one coordinate");
  for (const auto& p : points) {
    if (p.coords.size() != dim) throw Error(ErrorCode::DimensionMismatch, "point " + p.id + " has a different dimension");
    for (double c : p.coords) {
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "point " + p.id + " has a non-finite coordinate");
    }
  }
}

}  // namespace detail

/// Indices of every point within distance <= eps of p, p itself included when
/// it is part of `all`.
inline std::vector<std::size_t> eps_neighborhood(const Point& p, std::span<const Point> all, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].coords.size() != p.coords.size()) throw Error(ErrorCode::DimensionMismatch, "point " + all[i].id + " has a different dimension");
    if (distance(p.coords, all[i].coords) <= eps) out.push_back(i);
  }
  return out;
}

/// Affinely maps each coordinate onto [0,1]; a constant coordinate maps to 0.
inline std::vector<Point> normalize_minmax(std::span<const Point> points) {
  if (points.size() < 2) throw Error(ErrorCode::TooFewPoints, "min-max normalisation needs at least 2 points");
  detail::check_points(points);
  const auto dim = points.front().coords.size();
  std::vector<Point> out(points.begin(), points.end());
  for (std::size_t d = 0; d < dim; ++d) {
    double lo = points.front().coords[d];
    double hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p.coords[d]);
      hi = std::max(hi, p.coords[d]);
    }
    const double span = hi - lo;
    for (auto& p : out) p.coords[d] = span > 0.0 ? (p.coords[d] - lo) / span : 0.0;
  }
  return out;
}

/// Indices of `points` sorted by id, ties kept in input order.
inline std::vector<std::size_t> scan_order(std::span<const Point> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return IdLess{}(points[a].id, points[b].id); });
  return order;
}

inline ClusterAssignment dbscan(std::span<const Point> input, const Params& params) {
  params.validate();
  detail::check_points(input);
  std::vector<Point> normalized;
  std::span<const Point> points = input;
  if (params.normalize) {
    normalized = normalize_minmax(input);
    points = normalized;
  }
  const std::size_t n = points.size();

  const auto order = scan_order(points);
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  // Neighbour lists in scan order.
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto j = order[r];
      if (distance(points[i].coords, points[j].coords) <= params.eps) neighbors[i].push_back(j);
    }
  }

  ClusterAssignment out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[i].role = neighbors[i].size() >= params.min_pts ? Role::Core : Role::Noise;
  }

  int cluster = 0;
  std::deque<std::size_t> frontier;
  for (const auto seed : order) {
    if (out.labels[seed].role != Role::Core || out.labels[seed].cluster) continue;
    ++cluster;
    out.labels[seed].cluster = cluster;
    frontier.push_back(seed);
    while (!frontier.empty()) {
      const auto p = frontier.front();
      frontier.pop_front();
      for (const auto q : neighbors[p]) {
        auto& lq = out.labels[q];
        if (lq.cluster) continue;
        lq.cluster = cluster;
        if (lq.role == Role::Core) {
          frontier.push_back(q);
        } else {
          lq.role = Role::Border;
        }
      }
    }
  }
  out.cluster_count = cluster;
  return out;
}

inline ClusterAssignment dbscan(const std::vector<Point>& points, const Params& params) {
  return dbscan(std::span<const Point>(points), params);
}

struct ClusterSummary {
  int cluster_id = 0;
  std::size_t size = 0;
  std::size_t core_count = 0;
  std::vector<double> centroid;
};

/// Per-cluster sizes and centroids, computed on the points as given.
inline std::vector<ClusterSummary> summarize(std::span<const Point> points, const ClusterAssignment& assignment) {
  std::vector<ClusterSummary> out(static_cast<std::size_t>(assignment.cluster_count));
  const auto dim = points.empty() ? 0 : points.front().coords.size();
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].cluster_id = static_cast<int>(c) + 1;
    out[c].centroid.assign(dim, 0.0);
  }
  // Accumulate in scan order so the sums do not depend on input order.
  for (const auto i : scan_order(points)) {
    const auto& label = assignment.labels[i];
    if (!label.cluster) continue;
    auto& s = out[static_cast<std::size_t>(*label.cluster - 1)];
    ++s.size;
    if (label.role == Role::Core) ++s.core_count;
    for (std::size_t d = 0; d < dim; ++d) s.centroid[d] += points[i].coords[d];
  }
  for (auto& s : out) {
    for (auto& c : s.centroid) c /= static_cast<double>(s.size);
  }
  return out;
}

inline std::size_t noise_count(const ClusterAssignment& assignment) {
  return static_cast<std::size_t>(std::count_if(assignment.labels.begin(), assignment.labels.end(),
                                                [](const Label& l) { return l.role == Role::Noise; }));
}

inline constexpr std::string_view kClustersHeader = "stud_id,role,cluster_id";

/// clusters.csv rows in id order; cluster_id is empty for noise.
inline std::string write_clusters(std::span<const Point> points, const ClusterAssignment& assignment) {
  std::ostringstream os;
  os << kClustersHeader << '\n';
  for (const auto i : scan_order(points)) {
    const auto& l = assignment.labels[i];
    os << points[i].id << ',' << to_string(l.role) << ',';
    if (l.cluster) os << *l.cluster;
    os << '\n';
  }
  return os.str();
}

}  // namespace edm::dbscan
