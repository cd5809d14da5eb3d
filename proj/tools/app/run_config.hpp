#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kahlerlab::app {

/// Invalid configuration; `field` names the offending RunConfig key.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string field, const std::string& message)
      : std::runtime_error("field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  std::string command;
  std::string config;             ///< flat key = value file applied under the flags
  std::string model = "cp1";      ///< cp1, cp2 or cp3
  std::string perturbation;       ///< reference χ: library name, csv:PATH, or empty for Fubini-Study
  std::string potential;          ///< φ argument: library name, csv:PATH, or empty for the whole library
  int level = 0;                  ///< quadrature refinement level
  int nodes = 0;                  ///< Gauss nodes per axis; 0 selects the model default
  int m = 1;
  int k = 0;                      ///< 0 selects the command default
  int degree = 0;                 ///< continuity polynomial degree; 0 selects the solver default
  double dt = 0.01;
  double delta = 0.05;
  double tolerance = 1e-10;
  std::int64_t budget = 5000;     ///< alpha: monomial subspaces to test
  int probes = 4;                 ///< alpha: random-coefficient subspaces
  int samples = 0;                ///< seeded random draws; 0 selects the command default
  int probe = 0;                  ///< bergman: eigenvalue-control probe index k; 0 disables
  std::string rays;               ///< bergman: CSV file of ray exponent vectors, one ray per row
  int random_rays = 8;            ///< bergman: seeded Gaussian rays added to the coordinate rays
  double s_max = 16.0;
  double s_step = 2.0;
  int n = 0;                      ///< criterion dimension; 0 takes it from the model
  std::string alpha1;             ///< rationals as p/q or decimals
  std::string alphak;
  std::string lambda;
  std::string only;               ///< suite: comma-separated criterion numbers; empty runs all
  std::string out = "kahlerlab-out";
  std::uint64_t seed = 7;

  int dim() const;
};

/// One configurable field: the CLI flag is --key and the config-file key is key.
struct FieldSpec {
  std::string key;
  std::string type;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<FieldSpec>& config_fields();
const std::vector<std::pair<std::string, std::string>>& commands();

/// Throws UsageError for unknown keys or unparsable values.
void set_field(RunConfig& cfg, const std::string& key, const std::string& value);

/// key = value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Name of the output-directory override variable.
inline constexpr const char* kOutEnv = "KAHLERLAB_OUT";

/// Defaults, then the config file, then KAHLERLAB_OUT, then explicit flags.
RunConfig resolve_config(const std::string& command, const std::map<std::string, std::string>& flags);

/// Checks every field the command consumes against the module preconditions.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace kahlerlab::app
