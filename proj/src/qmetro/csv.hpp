#pragma once

#include <string>
#include <variant>
#include <vector>

namespace qmetro {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// Header row plus one line per row; throws Numerical naming the cell when a
/// value is NaN or infinite.
std::string to_csv(const Table& t);

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failed run never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qmetro
