#pragma once

#include <algorithm>
#include <compare>
#include <ostream>
#include <string>
#include <string_view>

#include "edm/error.hpp"

namespace edm {

using StudentId = std::string;

/// Orders ids so that all-digit ids sort numerically ("2" < "10") and ahead of
/// everything else; remaining ids sort lexicographically.
struct IdLess {
  using is_transparent = void;

  static bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  }

  bool operator()(std::string_view a, std::string_view b) const {
    const bool na = all_digits(a);
    const bool nb = all_digits(b);
    if (na != nb) return na;
    if (na) {
      auto strip = [](std::string_view s) {
        const auto pos = s.find_first_not_of('0');
        return pos == std::string_view::npos ? std::string_view{} : s.substr(pos);
      };
      const auto sa = strip(a);
      const auto sb = strip(b);
      if (sa.size() != sb.size()) return sa.size() < sb.size();
      if (sa != sb) return sa < sb;
    }
    return a < b;
  }
};

inline bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; });
}

/// A subject (or generic item) code such as "IT35". Ordering is plain
/// lexicographic on the code.
class SubjectId {
 public:
  SubjectId() = default;
  explicit SubjectId(std::string code) : code_(std::move(code)) {
    if (code_.empty()) throw Error(ErrorCode::InvalidArgument, "subject id is empty");
    if (has_whitespace(code_)) throw Error(ErrorCode::InvalidArgument, "subject id contains whitespace: '" + code_ + "'");
  }

  const std::string& str() const noexcept { return code_; }

  friend auto operator<=>(const SubjectId&, const SubjectId&) = default;
  friend bool operator==(const SubjectId&, const SubjectId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const SubjectId& id) { return os << id.code_; }

 private:
  std::string code_;
};

}  // namespace edm
