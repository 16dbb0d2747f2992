#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "bosde/config.hpp"
#include "bosde/csv.hpp"

namespace bosde {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides sde.seed
  int workers = 1;
  std::optional<std::string> out_dir;  // overrides output.path
  std::string config_path;
};

struct RunResult {
  int exit_code = 0;  // 2 when a verify / beta-check row fails
  CsvTable table;
  std::map<std::string, double> summary;
  std::string csv_path;
  std::string manifest_path;
};

// Computes the mode's table without touching the filesystem.
RunResult compute(const RunConfig& cfg, Mode mode, const RunOptions& opts);

// compute() plus <out>/<mode>.csv and <out>/manifest.json.
RunResult run(const RunConfig& cfg, Mode mode, const RunOptions& opts);

}  // namespace bosde
