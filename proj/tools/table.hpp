#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace confcurve::cli {

/// Empty cell: blank in CSV, null in JSON. Non-finite doubles print the same.
struct Null {};

using Cell = std::variant<Null, std::string, double, std::int64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

Format parse_format(const std::string& name);

/// Shortest round-trip decimal representation.
std::string format_number(double x);

void write_csv(const Table& t, std::ostream& out);
/// Array of row objects keyed by column name.
void write_json(const Table& t, std::ostream& out);
void write_table(const Table& t, Format f, std::ostream& out);

}  // namespace confcurve::cli
