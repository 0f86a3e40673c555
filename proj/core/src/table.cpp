#include "defosc/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace defosc::scenario {
namespace {

bool needs_quoting(const std::string& field) { return field.find_first_of(",\"\n\r") != std::string::npos; }

std::string csv_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const Table& table, const std::optional<std::string>& partial) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << csv_field(table.columns[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_number(row[c]);
    }
    out << '\n';
  }
  if (partial) out << "# partial output: " << *partial << '\n';
}

void write_json(std::ostream& out, const std::string& mode, const Table& table,
                const std::optional<std::string>& partial) {
  // Numbers are emitted by hand to keep the fixed 17-digit formatting.
  out << "{\"mode\":" << nlohmann::json(mode).dump() << ",\"columns\":[";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << nlohmann::json(table.columns[c]).dump();
  }
  out << "],\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out << ',';
    out << '[';
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << (std::isfinite(row[c]) ? format_number(row[c]) : "null");
    }
    out << ']';
  }
  out << "],\"partial\":" << (partial ? "true" : "false");
  if (partial) out << ",\"error\":" << nlohmann::json(*partial).dump();
  out << "}\n";
}

}  // namespace defosc::scenario
