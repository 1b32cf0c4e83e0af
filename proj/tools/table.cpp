#include "table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "study_csv.hpp"

namespace confcurve::cli {
namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(Null) const { return ""; }
    std::string operator()(const std::string& s) const { return csv_escape(s); }
    std::string operator()(double x) const { return std::isfinite(x) ? format_number(x) : ""; }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::json operator()(Null) const { return nullptr; }
    nlohmann::json operator()(const std::string& s) const { return s; }
    nlohmann::json operator()(double x) const {
      return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
    }
    nlohmann::json operator()(std::int64_t x) const { return x; }
    nlohmann::json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw InputError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

void write_table(const Table& t, Format f, std::ostream& out) {
  if (f == Format::csv) {
    write_csv(t, out);
  } else {
    write_json(t, out);
  }
}

}  // namespace confcurve::cli
