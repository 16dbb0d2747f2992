#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bosde {

// Numeric table with a header row and a "# seed=" comment line. Floating
// columns are written as %.16e (round-trips exactly); integer columns as
// plain integers.
struct CsvTable {
  std::uint64_t seed = 0;
  std::vector<std::string> comments;  // extra "# key=value" lines, after the seed
  std::vector<std::string> header;
  std::vector<bool> integer_column;   // empty means all floating
  std::vector<std::vector<double>> rows;

  void add_column(std::string name, bool integer = false);
  std::size_t column(const std::string& name) const;
};

std::string format_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace bosde
