#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/ids.hpp"

namespace edm {

// ---------------------------------------------------------------------------
// Subject catalog

struct Subject {
  SubjectId id;
  std::string title;
  int max_marks = 100;
};

class Catalog {
 public:
  static constexpr int kDefaultMaxMarks = 100;

  void add(Subject subject) {
    if (subject.max_marks <= 0) {
      throw Error(ErrorCode::InvalidArgument, "max_marks must be positive for " + subject.id.str());
    }
    const auto key = subject.id;
    if (!subjects_.emplace(key, std::move(subject)).second) {
      throw Error(ErrorCode::DuplicateEntry, "subject listed twice: " + key.str());
    }
  }

  bool contains(const SubjectId& id) const { return subjects_.count(id) != 0; }
  const Subject* find(const SubjectId& id) const {
    const auto it = subjects_.find(id);
    return it == subjects_.end() ? nullptr : &it->second;
  }
  std::size_t size() const noexcept { return subjects_.size(); }
  bool empty() const noexcept { return subjects_.empty(); }

  std::vector<SubjectId> ids() const {
    std::vector<SubjectId> out;
    out.reserve(subjects_.size());
    for (const auto& [id, _] : subjects_) out.push_back(id);
    return out;
  }

  const std::map<SubjectId, Subject>& subjects() const noexcept { return subjects_; }

  friend bool operator==(const Catalog& a, const Catalog& b) {
    if (a.subjects_.size() != b.subjects_.size()) return false;
    auto it = b.subjects_.begin();
    for (const auto& [id, s] : a.subjects_) {
      if (id != it->first || s.title != it->second.title || s.max_marks != it->second.max_marks) return false;
      ++it;
    }
    return true;
  }

 private:
  std::map<SubjectId, Subject> subjects_;
};

inline constexpr std::string_view kCatalogHeader = "subject_id,title,max_marks";

inline Catalog parse_catalog(std::istream& in) {
  Catalog catalog;
  for (const auto& row : csv::parse(in, kCatalogHeader)) {
    const auto max_marks = csv::parse_int<int>(row.fields[2]);
    if (!max_marks || *max_marks <= 0) throw Error(ErrorCode::MalformedRow, "bad max_marks '" + row.fields[2] + "'", row.line);
    try {
      catalog.add(Subject{SubjectId(row.fields[0]), row.fields[1], *max_marks});
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), row.line);
    }
  }
  return catalog;
}

inline Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse_catalog(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

// ---------------------------------------------------------------------------
// Marks

struct MarksRecord {
  StudentId student_id;
  SubjectId subject_id;
  int marks = 0;
  int max_marks = Catalog::kDefaultMaxMarks;
};

using MarksByStudent = std::map<StudentId, std::map<SubjectId, int>, IdLess>;

/// Per-student subject marks over a fixed catalog. Every stored mark lies in
/// [0, max_marks] of its subject and each (student, subject) pair is unique.
class CohortDataset {
 public:
  CohortDataset() = default;
  explicit CohortDataset(Catalog catalog) : catalog_(std::move(catalog)) {}

  void add(const MarksRecord& r, std::size_t line = 0) {
    const auto* subject = catalog_.find(r.subject_id);
    if (subject == nullptr) throw Error(ErrorCode::UnknownSubject, "unknown subject " + r.subject_id.str(), line);
    if (r.marks < 0 || r.marks > subject->max_marks) {
      throw Error(ErrorCode::OutOfRangeMarks,
                  "marks " + std::to_string(r.marks) + " outside [0," + std::to_string(subject->max_marks) + "] for " +
                      r.student_id + "/" + r.subject_id.str(),
                  line);
    }
    auto& row = students_[r.student_id];
    if (!row.emplace(r.subject_id, r.marks).second) {
      throw Error(ErrorCode::DuplicateEntry, "duplicate entry " + r.student_id + "/" + r.subject_id.str(), line);
    }
  }

  void add(const StudentId& student, const SubjectId& subject, int marks, std::size_t line = 0) {
    add(MarksRecord{student, subject, marks, 0}, line);
  }

  std::optional<int> marks(std::string_view student, const SubjectId& subject) const {
    const auto it = students_.find(student);
    if (it == students_.end()) return std::nullopt;
    const auto jt = it->second.find(subject);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  const Catalog& catalog() const noexcept { return catalog_; }
  Catalog& mutable_catalog() noexcept { return catalog_; }
  const MarksByStudent& students() const noexcept { return students_; }
  std::size_t student_count() const noexcept { return students_.size(); }

  std::size_t record_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [_, row] : students_) n += row.size();
    return n;
  }

  friend bool operator==(const CohortDataset& a, const CohortDataset& b) {
    return a.catalog_ == b.catalog_ && a.students_ == b.students_;
  }

 private:
  Catalog catalog_;
  MarksByStudent students_;
};

inline constexpr std::string_view kMarksHeader = "student_id,subject_id,marks";

inline void validate_student_id(const std::string& id, std::size_t line) {
  if (id.empty() || has_whitespace(id)) throw Error(ErrorCode::MalformedRow, "bad student id '" + id + "'", line);
}

namespace detail {

inline SubjectId subject_at(const std::string& code, std::size_t line) {
  try {
    return SubjectId(code);
  } catch (const Error&) {
    throw Error(ErrorCode::MalformedRow, "bad subject id '" + code + "'", line);
  }
}

inline CohortDataset parse_marks(std::istream& in, Catalog catalog, bool open_catalog) {
  CohortDataset ds(std::move(catalog));
  for (const auto& row : csv::parse(in, kMarksHeader)) {
    validate_student_id(row.fields[0], row.line);
    const auto subject = subject_at(row.fields[1], row.line);
    const auto marks = csv::parse_int<int>(row.fields[2]);
    if (!marks) throw Error(ErrorCode::MalformedRow, "marks is not an integer: '" + row.fields[2] + "'", row.line);
    if (open_catalog && !ds.catalog().contains(subject)) {
      ds.mutable_catalog().add(Subject{subject, "", Catalog::kDefaultMaxMarks});
    }
    ds.add(row.fields[0], subject, *marks, row.line);
  }
  return ds;
}

inline CohortDataset load_marks_file(const std::filesystem::path& path, Catalog catalog, bool open_catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse_marks(in, std::move(catalog), open_catalog);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

}  // namespace detail

/// Loads marks.csv against a fixed catalog; subjects outside it are rejected.
inline CohortDataset load_marks(const std::filesystem::path& path, const Catalog& catalog) {
  return detail::load_marks_file(path, catalog, false);
}

/// Loads marks.csv and infers the catalog from the subjects it mentions, each
/// on the default 0..100 scale.
inline CohortDataset load_marks(const std::filesystem::path& path) {
  return detail::load_marks_file(path, Catalog{}, true);
}

inline CohortDataset parse_marks(std::istream& in, const Catalog& catalog) { return detail::parse_marks(in, catalog, false); }
inline CohortDataset parse_marks(std::istream& in) { return detail::parse_marks(in, Catalog{}, true); }

inline std::string write_marks(const CohortDataset& ds) {
  std::ostringstream os;
  os << kMarksHeader << '\n';
  for (const auto& [student, row] : ds.students()) {
    for (const auto& [subject, marks] : row) os << student << ',' << subject << ',' << marks << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Pass table

using PassesByStudent = std::map<StudentId, std::map<SubjectId, bool>, IdLess>;

class PassTable {
 public:
  void add_student(const StudentId& student) { entries_[student]; }

  void set(const StudentId& student, const SubjectId& subject, bool passed, std::size_t line = 0) {
    if (!entries_[student].emplace(subject, passed).second) {
      throw Error(ErrorCode::DuplicateEntry, "duplicate entry " + student + "/" + subject.str(), line);
    }
  }

  std::optional<bool> passed(std::string_view student, const SubjectId& subject) const {
    const auto it = entries_.find(student);
    if (it == entries_.end()) return std::nullopt;
    const auto jt = it->second.find(subject);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  const PassesByStudent& entries() const noexcept { return entries_; }
  std::size_t student_count() const noexcept { return entries_.size(); }

  friend bool operator==(const PassTable&, const PassTable&) = default;

 private:
  PassesByStudent entries_;
};

inline constexpr int kDefaultPassMark = 40;

/// passed(s, j) = marks(s, j) >= pass_mark. Students without any pass keep an
/// (all false) row.
inline PassTable derive_pass_table(const CohortDataset& ds, int pass_mark) {
  if (pass_mark <= 0) throw Error(ErrorCode::InvalidArgument, "pass_mark must be positive");
  for (const auto& [id, subject] : ds.catalog().subjects()) {
    if (pass_mark > subject.max_marks) {
      throw Error(ErrorCode::InvalidArgument,
                  "pass_mark " + std::to_string(pass_mark) + " exceeds max_marks of " + id.str());
    }
  }
  PassTable pt;
  for (const auto& [student, row] : ds.students()) {
    pt.add_student(student);
    for (const auto& [subject, marks] : row) pt.set(student, subject, marks >= pass_mark);
  }
  return pt;
}

inline constexpr std::string_view kPassesHeader = "student_id,subject_id,passed";

inline PassTable parse_passes(std::istream& in, const Catalog& catalog) {
  PassTable pt;
  for (const auto& row : csv::parse(in, kPassesHeader)) {
    validate_student_id(row.fields[0], row.line);
    const auto subject = detail::subject_at(row.fields[1], row.line);
    if (!catalog.contains(subject)) throw Error(ErrorCode::UnknownSubject, "unknown subject " + subject.str(), row.line);
    const auto& flag = row.fields[2];
    if (flag != "0" && flag != "1") throw Error(ErrorCode::MalformedRow, "passed must be 0 or 1, got '" + flag + "'", row.line);
    pt.set(row.fields[0], subject, flag == "1", row.line);
  }
  return pt;
}

inline PassTable load_passes(const std::filesystem::path& path, const Catalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse_passes(in, catalog);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

// ---------------------------------------------------------------------------
// Performance labels

enum class Performance { Good, Average, Poor };

constexpr std::string_view to_string(Performance p) {
  switch (p) {
    case Performance::Good: return "GOOD";
    case Performance::Average: return "AVERAGE";
    case Performance::Poor: return "POOR";
  }
  return "POOR";
}

inline std::optional<Performance> parse_performance(std::string_view s) {
  if (s == "GOOD") return Performance::Good;
  if (s == "AVERAGE") return Performance::Average;
  if (s == "POOR") return Performance::Poor;
  return std::nullopt;
}

/// GOOD for total >= good_min, AVERAGE for average_min <= total < good_min,
/// POOR below.
struct DiscretizationPolicy {
  int good_min = 400;
  int average_min = 300;

  void validate() const {
    if (!(good_min > average_min && average_min > 0)) {
      throw Error(ErrorCode::InvalidArgument, "discretization requires good_min > average_min > 0, got " +
                                                  std::to_string(good_min) + "/" + std::to_string(average_min));
    }
  }
};

inline Performance discretize_performance(int total_marks, const DiscretizationPolicy& policy = {}) {
  if (total_marks < 0) throw Error(ErrorCode::InvalidArgument, "total marks must be nonnegative");
  if (total_marks >= policy.good_min) return Performance::Good;
  if (total_marks >= policy.average_min) return Performance::Average;
  return Performance::Poor;
}

// ---------------------------------------------------------------------------
// Classification and clustering inputs

struct ClassificationRow {
  StudentId stud_id;
  std::string dept;
  std::string attendance;  // "Y" or "N"
  int total_marks = 0;
  Performance performance = Performance::Poor;

  friend bool operator==(const ClassificationRow&, const ClassificationRow&) = default;
};

inline constexpr std::string_view kClassificationHeader = "stud_id,dept,attendance,marks";

inline std::vector<ClassificationRow> parse_classification(std::istream& in, const DiscretizationPolicy& policy) {
  policy.validate();
  std::vector<ClassificationRow> rows;
  std::map<StudentId, std::size_t, IdLess> seen;
  for (const auto& row : csv::parse(in, kClassificationHeader)) {
    validate_student_id(row.fields[0], row.line);
    if (row.fields[1].empty() || has_whitespace(row.fields[1])) throw Error(ErrorCode::MalformedRow, "bad dept '" + row.fields[1] + "'", row.line);
    if (row.fields[2] != "Y" && row.fields[2] != "N") {
      throw Error(ErrorCode::MalformedRow, "attendance must be Y or N, got '" + row.fields[2] + "'", row.line);
    }
    const auto marks = csv::parse_int<int>(row.fields[3]);
    if (!marks) throw Error(ErrorCode::MalformedRow, "marks is not an integer: '" + row.fields[3] + "'", row.line);
    if (*marks < 0) throw Error(ErrorCode::OutOfRangeMarks, "negative marks", row.line);
    if (!seen.emplace(row.fields[0], row.line).second) throw Error(ErrorCode::DuplicateEntry, "duplicate student " + row.fields[0], row.line);
    rows.push_back({row.fields[0], row.fields[1], row.fields[2], *marks, discretize_performance(*marks, policy)});
  }
  return rows;
}

inline std::vector<ClassificationRow> load_classification(const std::filesystem::path& path, const DiscretizationPolicy& policy = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse_classification(in, policy);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

inline std::string write_classification(const std::vector<ClassificationRow>& rows) {
  std::ostringstream os;
  os << kClassificationHeader << '\n';
  for (const auto& r : rows) os << r.stud_id << ',' << r.dept << ',' << r.attendance << ',' << r.total_marks << '\n';
  return os.str();
}

struct ClusterRow {
  StudentId stud_id;
  double attendance_pct = 0.0;
  double marks = 0.0;

  friend bool operator==(const ClusterRow&, const ClusterRow&) = default;
};

inline constexpr std::string_view kClusteringHeader = "stud_id,attendance,marks";

inline std::vector<ClusterRow> parse_clustering(std::istream& in) {
  std::vector<ClusterRow> rows;
  std::map<StudentId, std::size_t, IdLess> seen;
  for (const auto& row : csv::parse(in, kClusteringHeader)) {
    validate_student_id(row.fields[0], row.line);
    const auto attendance = csv::parse_real(row.fields[1]);
    const auto marks = csv::parse_real(row.fields[2]);
    if (!attendance || !marks) throw Error(ErrorCode::MalformedRow, "attendance and marks must be numbers", row.line);
    if (*attendance < 0.0 || *attendance > 100.0) throw Error(ErrorCode::OutOfRangeMarks, "attendance outside [0,100]", row.line);
    if (*marks < 0.0) throw Error(ErrorCode::OutOfRangeMarks, "negative marks", row.line);
    if (!seen.emplace(row.fields[0], row.line).second) throw Error(ErrorCode::DuplicateEntry, "duplicate student " + row.fields[0], row.line);
    rows.push_back({row.fields[0], *attendance, *marks});
  }
  return rows;
}

inline std::vector<ClusterRow> load_clustering(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse_clustering(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

/// Shortest of %.15g / %.17g that reads back to exactly `v`.
inline std::string format_real(double v) {
  for (int precision : {15, 17}) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    if (precision == 17 || std::strtod(os.str().c_str(), nullptr) == v) return os.str();
  }
  return {};
}

inline std::string write_clustering(const std::vector<ClusterRow>& rows) {
  std::ostringstream os;
  os << kClusteringHeader << '\n';
  for (const auto& r : rows) os << r.stud_id << ',' << format_real(r.attendance_pct) << ',' << format_real(r.marks) << '\n';
  return os.str();
}

}  // namespace edm
