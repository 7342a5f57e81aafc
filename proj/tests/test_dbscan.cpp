#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "edm/dbscan.hpp"
#include "oracles.hpp"

namespace {

using edm::dbscan::Params;
using edm::dbscan::Point;
using edm::dbscan::Role;

std::vector<std::vector<double>> coords_of(const std::vector<Point>& pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) out.push_back(p.coords);
  return out;
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    // Snap some coordinates to a coarse grid so exact-eps ties occur.
    double x = u(rng), y = u(rng);
    if (rng() % 4 == 0) {
      x = std::round(x);
      y = std::round(y);
    }
    pts.push_back({std::to_string(i), {x, y}});
  }
  return pts;
}

// Compares roles and the core partition with the reference, up to renaming of
// cluster ids.
void expect_matches_reference(const std::vector<Point>& pts, const Params& params) {
  const auto got = edm::dbscan::dbscan(pts, params);
  const auto ref = oracle::density_reference(coords_of(pts), params.eps, params.min_pts);
  std::map<int, std::size_t> to_ref;
  std::map<std::size_t, int> from_ref;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& l = got.labels[i];
    EXPECT_EQ(l.role == Role::Core, ref.core[i]) << "point " << i;
    EXPECT_EQ(l.role == Role::Noise, ref.noise[i]) << "point " << i;
    EXPECT_EQ(l.cluster.has_value(), l.role != Role::Noise);
    if (l.role != Role::Core) continue;
    const auto [a, fresh_a] = to_ref.emplace(*l.cluster, ref.component[i]);
    const auto [b, fresh_b] = from_ref.emplace(ref.component[i], *l.cluster);
    EXPECT_EQ(a->second, ref.component[i]);
    EXPECT_EQ(b->second, *l.cluster);
  }
  // Border points sit within eps of a core of their own cluster.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (got.labels[i].role != Role::Border) continue;
    bool ok = false;
    for (std::size_t j = 0; j < pts.size() && !ok; ++j) {
      ok = got.labels[j].role == Role::Core && got.labels[j].cluster == got.labels[i].cluster &&
           edm::dbscan::distance(pts[i].coords, pts[j].coords) <= params.eps;
    }
    EXPECT_TRUE(ok) << "border point " << i;
  }
}

TEST(Neighborhood, SelfAndBoundary) {
  const std::vector<Point> alone{{"p", {1.0, 1.0}}};
  EXPECT_EQ(edm::dbscan::eps_neighborhood(alone[0], alone, 0.5), std::vector<std::size_t>{0});
  const std::vector<Point> pts{{"p", {0.0, 0.0}}, {"q", {0.5, 0.0}}, {"r", {0.5 + 1e-9, 0.0}}};
  EXPECT_EQ(edm::dbscan::eps_neighborhood(pts[0], pts, 0.5), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(edm::dbscan::eps_neighborhood(pts[0], pts, 0.0), edm::Error);
}

TEST(Dbscan, SinglePointIsNoise) {
  const std::vector<Point> pts{{"1", {0.0, 0.0}}};
  const auto a = edm::dbscan::dbscan(pts, {1.0, 2, false});
  EXPECT_EQ(a.labels[0].role, Role::Noise);
  EXPECT_FALSE(a.labels[0].cluster);
  EXPECT_EQ(a.cluster_count, 0);
}

TEST(Dbscan, TwoBlobs) {
  std::vector<Point> pts;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 10; ++i) {
      pts.push_back({std::to_string(b * 10 + i + 1), {b * 100.0 + (i % 5) * 0.2, (i / 5) * 0.2}});
    }
  }
  const auto a = edm::dbscan::dbscan(pts, {1.0, 4, false});
  EXPECT_EQ(a.cluster_count, 2);
  EXPECT_EQ(edm::dbscan::noise_count(a), 0U);
  expect_matches_reference(pts, {1.0, 4, false});
  EXPECT_EQ(a.labels.front().cluster, 1);
  EXPECT_EQ(a.labels.back().cluster, 2);
}

TEST(Dbscan, Chain) {
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({"p" + std::to_string(i + 1), {static_cast<double>(i), 0.0}});
  const auto a = edm::dbscan::dbscan(pts, {1.0, 3, false});
  EXPECT_EQ(a.cluster_count, 1);
  EXPECT_EQ(a.labels[0].role, Role::Border);
  EXPECT_EQ(a.labels[4].role, Role::Border);
  for (int i = 1; i < 4; ++i) EXPECT_EQ(a.labels[static_cast<std::size_t>(i)].role, Role::Core);
  for (const auto& l : a.labels) EXPECT_EQ(l.cluster, 1);
  expect_matches_reference(pts, {1.0, 3, false});
}

TEST(Dbscan, SharedBorderGoesToFirstClusterInIdOrder) {
  // "m" is a non-core point within eps of core "z" (left) and core "a" (right).
  std::vector<Point> pts{{"z", {0.0, 0.0}},  {"y", {-0.5, 0.0}}, {"x", {-0.25, 0.0}}, {"m", {1.0, 0.0}},
                         {"a", {2.0, 0.0}},  {"b", {2.5, 0.0}},  {"c", {2.25, 0.0}}};
  const auto out = edm::dbscan::dbscan(pts, {1.0, 4, false});
  EXPECT_EQ(out.cluster_count, 2);
  EXPECT_EQ(out.labels[0].role, Role::Core);
  EXPECT_EQ(out.labels[4].role, Role::Core);
  EXPECT_EQ(out.labels[3].role, Role::Border);
  // "a" sorts first, so the right-hand group is cluster 1 and claims "m".
  EXPECT_EQ(out.labels[4].cluster, 1);
  EXPECT_EQ(out.labels[3].cluster, 1);
  EXPECT_EQ(out.labels[0].cluster, 2);
  expect_matches_reference(pts, {1.0, 4, false});
}

TEST(Dbscan, MinPtsOneHasNoNoise) {
  std::mt19937_64 rng(1);
  const auto pts = random_points(rng, 50);
  const auto a = edm::dbscan::dbscan(pts, {0.3, 1, false});
  EXPECT_EQ(edm::dbscan::noise_count(a), 0U);
  for (const auto& l : a.labels) EXPECT_EQ(l.role, Role::Core);
}

TEST(Dbscan, MatchesReferenceOnRandomData) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_points(rng, 1 + rng() % 200);
    const Params params{0.2 + static_cast<double>(rng() % 100) / 50.0, 1 + rng() % 8, false};
    expect_matches_reference(pts, params);
  }
}

TEST(Dbscan, PermutationKeepsRolesAndCorePartition) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(rng, 120);
    const Params params{1.0, 4, false};
    const auto base = edm::dbscan::dbscan(pts, params);
    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = edm::dbscan::dbscan(shuffled, params);
    std::map<std::string, edm::dbscan::Label> by_id;
    for (std::size_t i = 0; i < pts.size(); ++i) by_id[pts[i].id] = base.labels[i];
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
      const auto& want = by_id[shuffled[i].id];
      EXPECT_EQ(perm.labels[i].role, want.role);
      EXPECT_EQ(perm.labels[i].cluster, want.cluster);  // ids follow id order, so even numbering is stable
    }
    EXPECT_EQ(edm::dbscan::write_clusters(pts, base), edm::dbscan::write_clusters(shuffled, perm));
  }
}

TEST(Dbscan, InputErrors) {
  const std::vector<Point> empty;
  EXPECT_THROW(edm::dbscan::dbscan(empty, {}), edm::Error);
  const std::vector<Point> ragged{{"1", {0.0, 0.0}}, {"2", {1.0}}};
  try {
    edm::dbscan::dbscan(ragged, {});
    FAIL();
  } catch (const edm::Error& e) {
    EXPECT_EQ(e.code(), edm::ErrorCode::DimensionMismatch);
  }
  const std::vector<Point> ok{{"1", {0.0, 0.0}}};
  EXPECT_THROW(edm::dbscan::dbscan(ok, {0.0, 4, false}), edm::Error);
  EXPECT_THROW(edm::dbscan::dbscan(ok, {0.1, 0, false}), edm::Error);
}

TEST(Normalize, MinMax) {
  const std::vector<Point> unit{{"1", {0.0, 1.0}}, {"2", {1.0, 0.0}}, {"3", {0.5, 0.25}}};
  const auto same = edm::dbscan::normalize_minmax(unit);
  for (std::size_t i = 0; i < unit.size(); ++i) EXPECT_EQ(same[i].coords, unit[i].coords);

  const std::vector<Point> mixed{{"1", {50.0, 0.0}}, {"2", {100.0, 50.0}}, {"3", {75.0, 10.0}}};
  const auto n = edm::dbscan::normalize_minmax(mixed);
  EXPECT_EQ(n[0].coords, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(n[1].coords, (std::vector<double>{1.0, 1.0}));
  EXPECT_DOUBLE_EQ(n[2].coords[0], 0.5);
  EXPECT_DOUBLE_EQ(n[2].coords[1], 0.2);

  const std::vector<Point> constant{{"1", {90.0, 3.0}}, {"2", {90.0, 7.0}}};
  const auto c = edm::dbscan::normalize_minmax(constant);
  EXPECT_EQ(c[0].coords[0], 0.0);
  EXPECT_EQ(c[1].coords[0], 0.0);

  const std::vector<Point> one{{"1", {1.0, 1.0}}};
  try {
    edm::dbscan::normalize_minmax(one);
    FAIL();
  } catch (const edm::Error& e) {
    EXPECT_EQ(e.code(), edm::ErrorCode::TooFewPoints);
  }
}

TEST(Summary, CentroidsAndCsv) {
  const std::vector<Point> pts{{"2", {0.0, 0.0}}, {"1", {0.0, 1.0}}, {"3", {0.0, 2.0}}, {"10", {50.0, 50.0}}};
  const auto a = edm::dbscan::dbscan(pts, {1.0, 2, false});
  const auto s = edm::dbscan::summarize(pts, a);
  ASSERT_EQ(s.size(), 1U);
  EXPECT_EQ(s[0].size, 3U);
  EXPECT_DOUBLE_EQ(s[0].centroid[1], 1.0);
  EXPECT_EQ(edm::dbscan::write_clusters(pts, a), "stud_id,role,cluster_id\n1,CORE,1\n2,CORE,1\n3,CORE,1\n10,NOISE,\n");
}

}  // namespace
