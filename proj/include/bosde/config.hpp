#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bosde/core.hpp"
#include "bosde/dnse.hpp"
#include "bosde/dynamics.hpp"
#include "bosde/observables.hpp"
#include "bosde/sde.hpp"

namespace bosde {

enum class Mode { kMeanfield, kSde, kLindblad, kRandomwalk, kVerify, kDnseDemo, kBetaCheck };

std::string_view mode_name(Mode mode);
// Throws ValidationError (with a suggestion when one is close) on unknown names.
Mode parse_mode(std::string_view name);
const std::vector<std::string>& mode_names();

// Parse or validation failure located in the config text. line/column are
// 1-based; 0 when the problem has no single location.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& message, std::string field, long line, long column);
  const std::string& field() const { return field_; }
  long line() const { return line_; }
  long column() const { return column_; }

 private:
  std::string field_;
  long line_;
  long column_;
};

struct NamedObservable {
  std::string name;
  OneBodyObservable obs;
};

struct RunConfig {
  std::optional<Mode> mode;
  std::string system_kind;  // "dnse" or "general"
  SystemSpec system;
  std::optional<dnse::DnseParams> dnse;
  ModeVector z0;
  SdeConfig sde;
  bool seed_given = false;
  std::vector<NamedObservable> observables;
  std::string output_path;
  std::string source_text;
};

// "1", "-0.5", "2i", "-i", "1+2i", "3e-2 - 4.5i"
cplx parse_complex(std::string_view text);

RunConfig parse_config(std::string_view text, std::string_view source_name = "config");
RunConfig load_config(const std::string& path);

// Levenshtein distance, used for key suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);
std::optional<std::string> closest_match(std::string_view key, const std::vector<std::string>& options);

}  // namespace bosde
