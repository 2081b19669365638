#pragma once

#include "wlc/density_map.hpp"
#include "wlc/ensemble.hpp"
#include "wlc/quadrature.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wlc {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitValidation = 3, kExitIo = 4 };

/// Configuration problem; `where` names the line or key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Every field has a key in the flat text format and a CLI flag of the
/// same name (`--key value`).
struct JobConfig {
  std::string command = "energy";

  std::string geometry = "perpendicular";
  double a = 1.0;
  double spacing = 10.0;  ///< comb tooth spacing d (same units as a)
  int teeth = 3;          ///< comb teeth; 0 = periodic comb

  std::string ensemble;  ///< ensemble file; empty = generate from seed
  std::uint64_t loops = 1000;
  std::uint64_t ppl = 1000;
  std::uint32_t dim = 0;  ///< 0 = geometry default (1 for parallel, else 2)
  std::uint64_t seed = 1;

  QuadratureSettings quad;
  bool deterministic = true;

  GridSpec grid;

  double plate_area = 0.0;
  double c_1si = 0.0;
  double c_2si = 0.0;
  std::optional<double> gamma_1si;
  std::optional<double> gamma_2si;

  std::string output;
  std::string grid_output;
  std::string checkpoint;
  std::size_t stop_after_blocks = 0;  ///< 0 = run to completion

  /// Sets one key from its text value; throws ConfigError.
  void set(const std::string& key, const std::string& value);
  /// All keys with their current values, in a fixed order.
  std::vector<std::pair<std::string, std::string>> key_values() const;
  /// key = value text that reproduces this configuration.
  std::string to_text() const;
  /// Hash of every key that affects computed numbers.
  std::string settings_hash() const;
  std::uint32_t effective_dim() const;
  void validate() const;
};

struct ConfigKey {
  std::string key;
  std::string help;
};
const std::vector<ConfigKey>& config_keys();

/// Parses `key = value` lines; '#' starts a comment.
JobConfig parse_config(std::istream& in, JobConfig base = {});
JobConfig load_config(const std::filesystem::path& path, JobConfig base = {});

LoopSource make_source(const JobConfig& config);

/// Per-loop values of one observable computed block by block; completed
/// blocks are saved to the checkpoint file and skipped on resume.
struct BlockRun {
  std::vector<double> values;
  std::size_t blocks_done = 0;
  std::size_t blocks_total = 0;
  bool complete() const noexcept { return blocks_done == blocks_total; }
};
BlockRun run_blocks(const LoopSource& source, const LoopFunctional& functional, const JobConfig& config);

struct JobOutcome {
  int exit_code = kExitOk;
  nlohmann::json record;
};

/// Dispatches the command. Errors are reported through the exit code and
/// the record's "error" field.
JobOutcome run_job(const JobConfig& config, std::ostream& log);

nlohmann::json to_json(const IntegralResult& r);
nlohmann::json to_json(const EnsembleMeta& m);

std::string code_version();

}  // namespace wlc
