#pragma once

// Seeded synthetic cohorts with planted structure, for tests and demos.
//
// Correlated subject pairs are built as B = r*A + sqrt(1-r^2)*E with E made
// exactly orthogonal to A in-sample, so before clamping and rounding the sample
// correlation equals the target. Random draws come from mt19937_64 through
// local uniform/normal helpers, which keeps output identical across standard
// libraries.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "edm/error.hpp"
#include "edm/model.hpp"
#include "json.hpp"

namespace edm::synth {

struct PlantedPair {
  std::string a;
  std::string b;
  double r = 0.0;
};

struct PlantedRule {
  std::string dept;
  std::string attendance;
  Performance performance = Performance::Poor;
};

struct Blob {
  double attendance = 0.0;
  double marks = 0.0;
  std::size_t count = 0;
  double spread = 1.0;  // points are uniform in a disc of this radius
};

struct Spec {
  std::size_t students = 60;
  std::vector<std::string> subjects;
  int max_marks = 100;
  double mean = 50.0;
  double sd = 15.0;
  std::vector<PlantedPair> correlated_pairs;
  std::vector<PlantedPair> independent_pairs;  // planted at r = 0

  std::size_t class_students = 60;
  std::vector<std::string> depts{"COMP", "ETC", "IT"};
  std::vector<PlantedRule> rules;
  DiscretizationPolicy policy;

  std::vector<Blob> blobs;
  std::size_t noise_points = 0;
  double noise_separation = 15.0;
  double cluster_max_marks = 50.0;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  std::vector<PlantedPair> correlated_pairs;
  std::vector<PlantedPair> independent_pairs;
  std::vector<PlantedRule> rules;
  std::vector<std::vector<StudentId>> clusters;
  std::vector<StudentId> noise;
};

struct Cohort {
  CohortDataset marks;
  std::vector<ClassificationRow> classification;
  std::vector<ClusterRow> clustering;
  GroundTruth truth;
};

/// 60 students over twelve IT subjects: three pairs planted at r = 0.7, 0.8 and
/// 0.9, three independent pairs, a four-rule classification table and two
/// well-separated attendance/marks blobs plus five noise points.
inline Spec default_spec() {
  Spec s;
  s.subjects = {"IT31", "IT32", "IT33", "IT34", "IT35", "IT36", "IT41", "IT42", "IT43", "IT44", "IT45", "IT46"};
  s.correlated_pairs = {{"IT31", "IT41", 0.7}, {"IT35", "IT45", 0.8}, {"IT36", "IT46", 0.9}};
  s.independent_pairs = {{"IT32", "IT42", 0.0}, {"IT33", "IT43", 0.0}, {"IT34", "IT44", 0.0}};
  s.rules = {{"COMP", "Y", Performance::Good},
             {"COMP", "N", Performance::Average},
             {"ETC", "Y", Performance::Average},
             {"ETC", "N", Performance::Poor},
             {"IT", "Y", Performance::Good},
             {"IT", "N", Performance::Poor}};
  s.blobs = {{92.0, 40.0, 20, 3.0}, {60.0, 12.0, 20, 3.0}};
  s.noise_points = 5;
  return s;
}

namespace detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

inline std::vector<double> standardized_normals(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (auto& v : z) {
    v -= mean;
    ss += v * v;
  }
  const double scale = std::sqrt(ss / static_cast<double>(n - 1));
  for (auto& v : z) v /= scale;
  return z;
}

/// Unit-variance, zero-mean vector exactly uncorrelated with `base`.
inline std::vector<double> orthogonal_normals(Rng& rng, const std::vector<double>& base) {
  auto e = standardized_normals(rng, base.size());
  double dot = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    dot += e[i] * base[i];
    bb += base[i] * base[i];
  }
  for (std::size_t i = 0; i < base.size(); ++i) e[i] -= dot / bb * base[i];
  double ss = 0.0;
  for (double v : e) ss += v * v;
  const double scale = std::sqrt(ss / static_cast<double>(base.size() - 1));
  for (auto& v : e) v /= scale;
  return e;
}

inline int to_marks(double standardized, const Spec& spec) {
  const double raw = spec.mean + spec.sd * standardized;
  return static_cast<int>(std::lround(std::clamp(raw, 0.0, static_cast<double>(spec.max_marks))));
}

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline void infeasible(const std::string& why) { throw Error(ErrorCode::InfeasibleSpec, why); }

inline void validate(const Spec& spec) {
  if (spec.max_marks <= 0) infeasible("max_marks must be positive");
  if (!(spec.sd > 0.0) || !std::isfinite(spec.mean)) infeasible("marks distribution needs finite mean and sd > 0");
  std::set<std::string> subjects;
  for (const auto& s : spec.subjects) {
    if (s.empty() || has_whitespace(s)) infeasible("bad subject id '" + s + "'");
    if (!subjects.insert(s).second) infeasible("subject listed twice: " + s);
  }
  std::set<std::string> paired;
  auto check_pair = [&](const PlantedPair& p) {
    if (!subjects.count(p.a) || !subjects.count(p.b)) infeasible("pair references an unknown subject: " + p.a + "/" + p.b);
    if (p.a == p.b) infeasible("pair needs two distinct subjects: " + p.a);
    if (!paired.insert(p.a).second || !paired.insert(p.b).second) infeasible("subject used by more than one pair");
    if (!(p.r > -1.0 && p.r < 1.0)) infeasible("target r must lie in (-1,1)");
  };
  for (const auto& p : spec.correlated_pairs) check_pair(p);
  for (const auto& p : spec.independent_pairs) check_pair(p);
  if (!paired.empty() && spec.students < 3) infeasible("planted pairs need at least 3 students");

  try {
    spec.policy.validate();
  } catch (const Error& e) {
    infeasible(e.what());
  }
  if (spec.class_students > 0 && spec.depts.empty()) infeasible("classification needs at least one dept");
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& r : spec.rules) {
    if (r.attendance != "Y" && r.attendance != "N") infeasible("rule attendance must be Y or N");
    if (!keys.emplace(r.dept, r.attendance).second) infeasible("duplicate rule for " + r.dept + "/" + r.attendance);
  }

  if (!(spec.cluster_max_marks > 0.0)) infeasible("cluster_max_marks must be positive");
  for (const auto& b : spec.blobs) {
    if (b.count == 0 || !(b.spread > 0.0)) infeasible("blobs need count > 0 and spread > 0");
    if (b.attendance - b.spread < 0.0 || b.attendance + b.spread > 100.0 || b.marks - b.spread < 0.0 ||
        b.marks + b.spread > spec.cluster_max_marks) {
      infeasible("blob extends outside the attendance/marks box");
    }
  }
  if (spec.noise_points > 0 && !(spec.noise_separation > 0.0)) infeasible("noise_separation must be positive");
}

}  // namespace detail

inline Cohort generate_synthetic_cohort(const Spec& spec, std::uint64_t seed) {
  detail::validate(spec);
  detail::Rng rng(seed);
  Cohort out;
  out.truth.seed = seed;
  out.truth.correlated_pairs = spec.correlated_pairs;
  out.truth.independent_pairs = spec.independent_pairs;
  out.truth.rules = spec.rules;

  // Marks.
  Catalog catalog;
  for (const auto& s : spec.subjects) catalog.add(Subject{SubjectId(s), "", spec.max_marks});
  std::map<std::string, std::vector<double>> columns;
  auto plant = [&](const PlantedPair& p) {
    const auto a = detail::standardized_normals(rng, spec.students);
    const auto e = detail::orthogonal_normals(rng, a);
    std::vector<double> b(spec.students);
    const double k = std::sqrt(1.0 - p.r * p.r);
    for (std::size_t i = 0; i < spec.students; ++i) b[i] = p.r * a[i] + k * e[i];
    columns[p.a] = a;
    columns[p.b] = b;
  };
  for (const auto& p : spec.correlated_pairs) plant(p);
  for (const auto& p : spec.independent_pairs) plant(p);
  for (const auto& s : spec.subjects) {
    if (columns.count(s)) continue;
    std::vector<double> z(spec.students);
    for (auto& v : z) v = rng.normal();
    columns[s] = std::move(z);
  }
  out.marks = CohortDataset(std::move(catalog));
  for (std::size_t i = 0; i < spec.students; ++i) {
    const auto student = std::to_string(i + 1);
    for (const auto& s : spec.subjects) out.marks.add(student, SubjectId(s), detail::to_marks(columns[s][i], spec));
  }

  // Classification rows.
  std::map<std::pair<std::string, std::string>, Performance> table;
  for (const auto& r : spec.rules) table[{r.dept, r.attendance}] = r.performance;
  const auto& pol = spec.policy;
  auto draw_marks = [&](Performance p) {
    auto in = [&](int lo, int hi) { return lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1))); };
    switch (p) {
      case Performance::Good: return in(pol.good_min, pol.good_min + 99);
      case Performance::Average: return in(pol.average_min, pol.good_min - 1);
      case Performance::Poor: return in(std::max(0, pol.average_min - 100), pol.average_min - 1);
    }
    return 0;
  };
  for (std::size_t i = 0; i < spec.class_students; ++i) {
    ClassificationRow row;
    row.stud_id = std::to_string(i + 1);
    row.dept = spec.depts[rng.index(spec.depts.size())];
    row.attendance = rng.uniform() < 0.5 ? "Y" : "N";
    const auto it = table.find({row.dept, row.attendance});
    row.performance = it != table.end() ? it->second : static_cast<Performance>(rng.index(3));
    row.total_marks = draw_marks(row.performance);
    out.classification.push_back(std::move(row));
  }

  // Clustering rows.
  std::size_t next_id = 1;
  for (const auto& b : spec.blobs) {
    std::vector<StudentId> members;
    for (std::size_t k = 0; k < b.count; ++k) {
      double dx = 0.0;
      double dy = 0.0;
      do {
        dx = 2.0 * rng.uniform() - 1.0;
        dy = 2.0 * rng.uniform() - 1.0;
      } while (dx * dx + dy * dy > 1.0);
      const auto id = std::to_string(next_id++);
      out.clustering.push_back({id, detail::round2(b.attendance + b.spread * dx), detail::round2(b.marks + b.spread * dy)});
      members.push_back(id);
    }
    out.truth.clusters.push_back(std::move(members));
  }
  std::vector<std::pair<double, double>> placed;
  for (std::size_t k = 0; k < spec.noise_points; ++k) {
    bool ok = false;
    for (int attempt = 0; attempt < 100000 && !ok; ++attempt) {
      const double att = detail::round2(100.0 * rng.uniform());
      const double mk = detail::round2(spec.cluster_max_marks * rng.uniform());
      ok = true;
      for (const auto& b : spec.blobs) {
        if (std::hypot(att - b.attendance, mk - b.marks) < b.spread + spec.noise_separation) ok = false;
      }
      for (const auto& [pa, pm] : placed) {
        if (std::hypot(att - pa, mk - pm) < spec.noise_separation) ok = false;
      }
      if (ok) {
        placed.emplace_back(att, mk);
        const auto id = std::to_string(next_id++);
        out.clustering.push_back({id, att, mk});
        out.truth.noise.push_back(id);
      }
    }
    if (!ok) detail::infeasible("cannot place noise points with the requested separation");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline Spec spec_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Spec s = default_spec();
    auto read_pairs = [](const nlohmann::json& arr, bool with_r) {
      std::vector<PlantedPair> out;
      for (const auto& p : arr) out.push_back({p.at("a").get<std::string>(), p.at("b").get<std::string>(), with_r ? p.at("r").get<double>() : 0.0});
      return out;
    };
    if (j.contains("students")) s.students = j.at("students").get<std::size_t>();
    if (j.contains("subjects")) s.subjects = j.at("subjects").get<std::vector<std::string>>();
    if (j.contains("max_marks")) s.max_marks = j.at("max_marks").get<int>();
    if (j.contains("mean")) s.mean = j.at("mean").get<double>();
    if (j.contains("sd")) s.sd = j.at("sd").get<double>();
    if (j.contains("correlated_pairs")) s.correlated_pairs = read_pairs(j.at("correlated_pairs"), true);
    if (j.contains("independent_pairs")) s.independent_pairs = read_pairs(j.at("independent_pairs"), false);
    if (j.contains("classification")) {
      const auto& c = j.at("classification");
      if (c.contains("students")) s.class_students = c.at("students").get<std::size_t>();
      if (c.contains("depts")) s.depts = c.at("depts").get<std::vector<std::string>>();
      if (c.contains("good_min")) s.policy.good_min = c.at("good_min").get<int>();
      if (c.contains("average_min")) s.policy.average_min = c.at("average_min").get<int>();
      if (c.contains("rules")) {
        s.rules.clear();
        for (const auto& r : c.at("rules")) {
          const auto label = r.at("performance").get<std::string>();
          const auto perf = parse_performance(label);
          if (!perf) throw Error(ErrorCode::InfeasibleSpec, "unknown performance label '" + label + "'");
          s.rules.push_back({r.at("dept").get<std::string>(), r.at("attendance").get<std::string>(), *perf});
        }
      }
    }
    if (j.contains("clusters")) {
      const auto& c = j.at("clusters");
      if (c.contains("blobs")) {
        s.blobs.clear();
        for (const auto& b : c.at("blobs")) {
          s.blobs.push_back({b.at("attendance").get<double>(), b.at("marks").get<double>(), b.at("count").get<std::size_t>(),
                             b.value("spread", 1.0)});
        }
      }
      if (c.contains("noise")) s.noise_points = c.at("noise").get<std::size_t>();
      if (c.contains("noise_separation")) s.noise_separation = c.at("noise_separation").get<double>();
      if (c.contains("max_marks")) s.cluster_max_marks = c.at("max_marks").get<double>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InfeasibleSpec, std::string("malformed synth spec: ") + e.what());
  }
}

inline std::string ground_truth_json(const GroundTruth& t) {
  nlohmann::ordered_json j;
  j["seed"] = t.seed;
  auto pairs = [](const std::vector<PlantedPair>& ps, bool with_r) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : ps) {
      nlohmann::ordered_json pj;
      pj["a"] = p.a;
      pj["b"] = p.b;
      if (with_r) pj["r"] = p.r;
      arr.push_back(std::move(pj));
    }
    return arr;
  };
  j["correlated_pairs"] = pairs(t.correlated_pairs, true);
  j["independent_pairs"] = pairs(t.independent_pairs, false);
  auto rules = nlohmann::ordered_json::array();
  for (const auto& r : t.rules) {
    nlohmann::ordered_json rj;
    rj["dept"] = r.dept;
    rj["attendance"] = r.attendance;
    rj["performance"] = std::string(to_string(r.performance));
    rules.push_back(std::move(rj));
  }
  j["classification_rules"] = std::move(rules);
  auto clusters = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < t.clusters.size(); ++c) {
    nlohmann::ordered_json cj;
    cj["cluster"] = c + 1;
    cj["members"] = t.clusters[c];
    clusters.push_back(std::move(cj));
  }
  j["clusters"] = std::move(clusters);
  j["noise"] = t.noise;
  return j.dump(2) + "\n";
}

}  // namespace edm::synth
