#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "edm/error.hpp"

// Minimal CSV plumbing: comma separated, no quoting, first line is a header.

namespace edm::csv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Parses CSV text, checks the header against `expected_header` and returns the
/// data rows. Blank lines are skipped; a trailing '\r' is tolerated.
inline std::vector<Row> parse(std::istream& in, std::string_view expected_header) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (line != expected_header) {
        throw Error(ErrorCode::MalformedRow, "expected header '" + std::string(expected_header) + "', got '" + line + "'", lineno);
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line);
    const auto columns = split(expected_header).size();
    if (fields.size() != columns) {
      throw Error(ErrorCode::MalformedRow,
                  "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()), lineno);
    }
    rows.push_back(Row{lineno, std::move(fields)});
  }
  if (!saw_header) throw Error(ErrorCode::MalformedRow, "missing header '" + std::string(expected_header) + "'", 1);
  return rows;
}

inline std::vector<Row> read_file(const std::filesystem::path& path, std::string_view expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return parse(in, expected_header);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()), e.line());
  }
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // from_chars for double is not available in every libstdc++ we target.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

/// Writes each (path, contents) pair to a temporary sibling first and renames
/// only once every temporary has been written, so a failure leaves no partial
/// outputs behind.
inline void write_all_atomic(const std::vector<std::pair<std::filesystem::path, std::string>>& files) {
  std::vector<std::filesystem::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (const auto& [path, contents] : files) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) {
      cleanup();
      throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(temps[i], files[i].first);
}

}  // namespace edm::csv
