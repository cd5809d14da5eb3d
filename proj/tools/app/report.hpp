#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace kahlerlab::app {

using nlohmann::json;

inline constexpr const char* kSchema = "kahlerlab-report/1";

/// A plottable series or table; written with its header even when it has no rows.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  void add_numbers(const std::vector<double>& row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip text for a double ("inf"/"nan" for non-finite values).
std::string number_text(double v);
/// JSON number, or the strings "inf", "-inf", "nan".
json number(double v);

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  ///< "<=", ">=", "<", ">", "==" or "true"
  double threshold = 0.0;
  bool pass = false;
};

/// Results, exact fields, acceptance checks and CSV tables of a run.
class Report {
 public:
  json results = json::object();
  json exact = json::object();  ///< reproducible fields entering the hash
  std::vector<Check> checks;
  std::map<std::string, CsvTable> tables;

  void require(const std::string& name, double value, const std::string& relation, double threshold);
  void require(const std::string& name, bool ok);
  bool pass() const;
  /// Nests another report under `prefix` (checks renamed prefix/name, tables prefix_file).
  void merge(const std::string& prefix, Report&& sub);
  json checks_json() const;
};

/// SHA-1 of the canonical (sorted-key, compact) serialisation.
std::string exact_hash(const json& exact);

/// Document with schema, config echo, provenance, results, checks, exact fields and hash.
json document(const json& config, const Report& report);

/// Writes <dir>/<stem>.json and every table; returns the paths written.
std::vector<std::string> write_outputs(const std::string& dir, const std::string& stem, const json& doc,
                                       const Report& report);

}  // namespace kahlerlab::app
