#include "bosde/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bosde/core.hpp"

namespace bosde {

void CsvTable::add_column(std::string name, bool integer) {
  integer_column.resize(header.size(), false);
  header.push_back(std::move(name));
  integer_column.push_back(integer);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DimensionError("csv: no column \"" + name + "\"");
}

std::string format_csv(const CsvTable& table) {
  std::string out = "# seed=" + std::to_string(table.seed) + "\n";
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DimensionError("csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const bool integer = i < table.integer_column.size() && table.integer_column[i];
      if (integer) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(row[i]));
      } else {
        std::snprintf(buf, sizeof buf, "%.16e", row[i]);
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << format_csv(table);
  if (!out) throw Error("write failed for " + path);
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      if (body.rfind("seed=", 0) == 0) {
        table.seed = std::strtoull(body.c_str() + 5, nullptr, 10);
      } else {
        table.comments.push_back(body);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      for (auto& c : cells) table.add_column(c);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) throw DimensionError("csv: ragged row: " + line);
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      row.push_back(std::strtod(cells[i].c_str(), &end));
      if (end == cells[i].c_str() || *end != '\0') throw ValidationError("csv: bad number " + cells[i]);
      if (cells[i].find_first_of(".eEnN") == std::string::npos) table.integer_column[i] = true;
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("csv: missing header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace bosde
