#pragma once

// Pearson correlation over aligned per-subject marks, and the two-step
// related-subjects pipeline: confidence-filtered candidate pairs, then r >= gamma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "edm/assoc.hpp"
#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/model.hpp"

namespace edm::correlate {

inline constexpr double kDefaultGamma = 0.5;
inline constexpr std::size_t kDefaultMinN = 3;

/// Sample Pearson r, computed two-pass (means first, then centered sums) so
/// marks-scale data does not cancel catastrophically. Symmetric in its
/// arguments bit-for-bit.
inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw Error(ErrorCode::SampleTooSmall, "need at least 3 paired values, got " + std::to_string(n));
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw Error(ErrorCode::ZeroVariance, "first variable is constant");
  if (syy == 0.0) throw Error(ErrorCode::ZeroVariance, "second variable is constant");
  // sxy / ((n-1) Sx Sy) with the (n-1) factors cancelled.
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  return pearson_r(std::span<const double>(xs), std::span<const double>(ys));
}

struct PairedSample {
  SubjectId subject_i;
  SubjectId subject_j;
  std::vector<StudentId> students;
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t n() const noexcept { return xs.size(); }
};

/// Marks of the students recorded in both subjects, aligned by student and in
/// student-id order.
inline PairedSample build_paired_sample(const CohortDataset& ds, const SubjectId& i, const SubjectId& j) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "paired sample needs two distinct subjects");
  PairedSample s{i, j, {}, {}, {}};
  for (const auto& [student, row] : ds.students()) {
    const auto a = row.find(i);
    const auto b = row.find(j);
    if (a == row.end() || b == row.end()) continue;
    s.students.push_back(student);
    s.xs.push_back(a->second);
    s.ys.push_back(b->second);
  }
  return s;
}

enum class SkipReason { None, SampleTooSmall, ZeroVariance };

constexpr std::string_view to_string(SkipReason r) {
  switch (r) {
    case SkipReason::None: return "";
    case SkipReason::SampleTooSmall: return "SampleTooSmall";
    case SkipReason::ZeroVariance: return "ZeroVariance";
  }
  return "";
}

struct CorrelationReport {
  SubjectId subject_i;
  SubjectId subject_j;
  std::size_t n = 0;
  double r = std::numeric_limits<double>::quiet_NaN();  // NaN when skipped
  bool strong = false;
  double gamma = kDefaultGamma;
  SkipReason skip = SkipReason::None;
};

struct RelatedOptions {
  double gamma = kDefaultGamma;
  std::size_t min_n = kDefaultMinN;
  std::optional<double> minconf_override;
  assoc::PassRateScope scope = assoc::PassRateScope::AllStudents;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0,1)");
    if (min_n < 3) throw Error(ErrorCode::InvalidArgument, "min_n must be at least 3");
    if (minconf_override && !(*minconf_override >= 0.0 && *minconf_override <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "minconf must lie in [0,1]");
    }
  }
};

/// Computes r once per unordered pair (r is symmetric). Pairs that cannot be
/// evaluated stay in the output with a skip reason.
inline std::vector<CorrelationReport> correlate_pairs(const CohortDataset& ds, std::span<const assoc::SubjectPair> pairs,
                                                      double gamma, std::size_t min_n) {
  std::vector<CorrelationReport> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const auto sample = build_paired_sample(ds, i, j);
    CorrelationReport rep{i, j, sample.n(), std::numeric_limits<double>::quiet_NaN(), false, gamma, SkipReason::None};
    if (sample.n() < min_n) {
      rep.skip = SkipReason::SampleTooSmall;
    } else {
      try {
        rep.r = pearson_r(sample.xs, sample.ys);
        rep.strong = rep.r >= gamma;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVariance) throw;
        rep.skip = SkipReason::ZeroVariance;
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

struct RelatedAnalysis {
  assoc::CandidateSearch candidates;
  std::vector<CorrelationReport> reports;
};

/// Full pipeline: pass transactions -> confidence candidates -> Pearson verdicts.
inline RelatedAnalysis analyze_related(const CohortDataset& ds, const PassTable& pt, const Catalog& catalog,
                                       const RelatedOptions& opts = {}) {
  opts.validate();
  const auto db = assoc::build_transactions(pt);
  RelatedAnalysis out;
  out.candidates = assoc::find_candidates(db, pt, catalog, opts.minconf_override, opts.scope);
  out.reports = correlate_pairs(ds, out.candidates.pairs, opts.gamma, opts.min_n);
  return out;
}

inline std::vector<CorrelationReport> strongly_related(const CohortDataset& ds, const PassTable& pt, const Catalog& catalog,
                                                       double gamma = kDefaultGamma, std::size_t min_n = kDefaultMinN) {
  RelatedOptions opts;
  opts.gamma = gamma;
  opts.min_n = min_n;
  return analyze_related(ds, pt, catalog, opts).reports;
}

inline constexpr std::string_view kRelatedHeader = "subject_i,subject_j,n,r,strong,skip_reason";

inline std::string write_related(std::span<const CorrelationReport> reports) {
  std::ostringstream os;
  os << kRelatedHeader << '\n';
  for (const auto& rep : reports) {
    os << rep.subject_i << ',' << rep.subject_j << ',' << rep.n << ',';
    if (rep.skip == SkipReason::None) os << csv::fixed6(rep.r);
    os << ',' << (rep.strong ? 1 : 0) << ',' << to_string(rep.skip) << '\n';
  }
  return os.str();
}

inline std::string write_related(const std::vector<CorrelationReport>& reports) {
  return write_related(std::span<const CorrelationReport>(reports));
}

}  // namespace edm::correlate
