#include "study_csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace confcurve::cli {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line) + ": ";
}

double parse_double(const std::string& text, const std::string& column,
                    const std::string& source, int line) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InputError(where(source, line) + "column '" + column + "': '" + text +
                     "' is not a number");
  }
  return value;
}

int parse_int(const std::string& text, const std::string& column, const std::string& source,
              int line) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InputError(where(source, line) + "column '" + column + "': '" + text +
                     "' is not an integer");
  }
  return value;
}

}  // namespace

std::vector<StudyRow> read_study_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw InputError(source + ": missing header row");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!col.emplace(header[i], i).second) {
      throw InputError(where(source, line_no) + "duplicate column '" + header[i] + "'");
    }
  }
  const auto find = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };
  const auto id_col = find("id");
  const auto est_col = find("estimate");
  const auto se_col = find("se");
  const auto et_col = find("e_t");
  const auto nt_col = find("n_t");
  const auto ec_col = find("e_c");
  const auto nc_col = find("n_c");
  if (!id_col) throw InputError(where(source, line_no) + "header lacks an 'id' column");
  const bool effect = est_col && se_col;
  const bool counts = et_col && nt_col && ec_col && nc_col;
  if (!effect && !counts) {
    throw InputError(where(source, line_no) +
                     "header needs columns estimate,se or e_t,n_t,e_c,n_c");
  }

  std::vector<StudyRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError(where(source, line_no) + "expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    StudyRow row;
    row.line = line_no;
    row.id = fields[*id_col];
    if (effect) {
      row.has_effect = true;
      row.estimate = parse_double(fields[*est_col], "estimate", source, line_no);
      row.se = parse_double(fields[*se_col], "se", source, line_no);
      if (!std::isfinite(row.estimate)) {
        throw InputError(where(source, line_no) + "estimate must be finite");
      }
      if (!(row.se > 0.0) || !std::isfinite(row.se)) {
        throw InputError(where(source, line_no) + "se must be positive");
      }
    }
    if (counts) {
      row.has_counts = true;
      row.counts = {parse_int(fields[*et_col], "e_t", source, line_no),
                    parse_int(fields[*nt_col], "n_t", source, line_no),
                    parse_int(fields[*ec_col], "e_c", source, line_no),
                    parse_int(fields[*nc_col], "n_c", source, line_no)};
      try {
        validate(row.counts);
      } catch (const std::invalid_argument& e) {
        throw InputError(where(source, line_no) + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no studies found");
  return rows;
}

std::vector<Study> to_studies(const std::vector<StudyRow>& rows, const std::string& source) {
  std::vector<Study> studies;
  studies.reserve(rows.size());
  for (const auto& row : rows) {
    Study s;
    s.id = row.id;
    if (row.has_counts) s.counts = row.counts;
    if (row.has_effect) {
      s.estimate = row.estimate;
      s.se = row.se;
    } else {
      try {
        const auto e = log_or_from_counts(row.counts);
        s.estimate = e.estimate;
        s.se = e.se;
      } catch (const std::invalid_argument& e) {
        throw InputError(where(source, row.line) + "study '" + row.id + "': " + e.what());
      }
    }
    studies.push_back(std::move(s));
  }
  return studies;
}

}  // namespace confcurve::cli
