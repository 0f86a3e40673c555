#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace defosc::scenario {

enum class OutputFormat { csv, json };

/// Numeric result table. Every value is written with 17 significant digits so
/// that output bytes depend only on the computed doubles.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double value);

/// RFC-4180 style: header row, comma separated, CRLF-free '\n' line ends.
/// A partial table ends with a "# partial output: <reason>" marker line.
void write_csv(std::ostream& out, const Table& table, const std::optional<std::string>& partial = std::nullopt);

/// {"mode": ..., "columns": [...], "rows": [[...]], "partial": bool[, "error": ...]};
/// non-finite values are written as null.
void write_json(std::ostream& out, const std::string& mode, const Table& table,
                const std::optional<std::string>& partial = std::nullopt);

}  // namespace defosc::scenario
