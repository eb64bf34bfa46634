#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace selfapprox::cli {

using Json = nlohmann::ordered_json;

enum class KeyType { kString, kReal, kCount, kInteger, kBool, kRealList, kCountList, kTextList };

struct KeySpec {
  std::string name;
  KeyType type = KeyType::kString;
  std::string default_value;
  std::string help;
  /// Commands whose results depend on the key; empty means run-level plumbing.
  std::vector<std::string> commands;
  std::vector<std::string> aliases;
};

/// Every accepted key, in the order used for manifests and reports.
const std::vector<KeySpec>& key_registry();
const std::vector<std::string>& command_names();

/// Resolves an alias ("d") to its canonical key ("shifts"); nullopt for unknown keys.
std::optional<std::string> canonical_key(const std::string& name);

/// Fully resolved run configuration: one string value per registered key.
class RunConfig {
 public:
  std::string command;
  std::map<std::string, std::string> values;

  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] std::uint64_t count(const std::string& key) const;
  [[nodiscard]] std::int64_t integer(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;
  [[nodiscard]] std::vector<double> reals(const std::string& key) const;
  [[nodiscard]] std::vector<std::uint64_t> counts(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> texts(const std::string& key) const;

  /// Typed value of a key as it appears in reports.
  [[nodiscard]] Json typed(const std::string& key) const;
  /// Every key with its resolved text, for manifest.json.
  [[nodiscard]] Json manifest() const;
  /// The keys the command's results depend on, typed.
  [[nodiscard]] Json parameters() const;
};

/// Raw key/value pairs from a config file: "key = value" lines ('#' comments) or a JSON
/// object, either flat or a manifest with "command" and "config" members.
struct ConfigSource {
  std::optional<std::string> command;
  std::map<std::string, std::string> values;
};
ConfigSource read_config_file(const std::filesystem::path& path);

/// defaults < config file < SELFAPPROX_OUTPUT_DIR (output-dir only) < command line.
/// Throws ConfigError on unknown keys, unknown commands or malformed values.
RunConfig resolve(std::optional<std::string> command, const std::map<std::string, std::string>& command_line,
                  const std::optional<std::string>& env_output_dir);

/// Throws ConfigError if any value fails to parse as its key's type.
void validate(const RunConfig& config);

struct PlotPoint {
  std::string series;
  double x = 0.0;
  double y = 0.0;
};

struct Outcome {
  Json results;  // written to results.json
  std::string samples_csv;
  std::vector<PlotPoint> plot;
  /// For selfcheck and similar: a nonzero status with successful artifacts.
  int status = 0;
};

/// Runs the command in memory.
Outcome execute(const RunConfig& config);

/// Runs the command and writes manifest.json, results.json, samples.csv and plotdata.csv
/// (plus plotdata.json with format=json) into output-dir. Errors are reported as JSON on `err` with a nonzero return.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// {"error": {"type": ..., "message": ...}}
Json error_json(const std::exception& e);
int exit_code(const std::exception& e);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);
/// Shortest text that reads back to the same double.
std::string format_real(double x);

}  // namespace selfapprox::cli
