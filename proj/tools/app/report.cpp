#include "app/report.hpp"

#include <boost/uuid/detail/sha1.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef KAHLERLAB_VERSION
#define KAHLERLAB_VERSION "unknown"
#endif

namespace kahlerlab::app {

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

bool compare(double value, const std::string& rel, double threshold) {
  if (std::isnan(value)) return false;
  if (rel == "<=") return value <= threshold;
  if (rel == ">=") return value >= threshold;
  if (rel == "<") return value < threshold;
  if (rel == ">") return value > threshold;
  if (rel == "==") return value == threshold;
  throw std::invalid_argument("unknown relation " + rel);
}

}  // namespace

std::string number_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return number_text(v);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::add_numbers(const std::vector<double>& row) {
  std::vector<std::string> cells;
  for (double v : row) cells.push_back(number_text(v));
  add(std::move(cells));
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << csv_cell(header_[i]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void Report::require(const std::string& name, double value, const std::string& relation, double threshold) {
  checks.push_back({name, value, relation, threshold, compare(value, relation, threshold)});
}

void Report::require(const std::string& name, bool ok) { checks.push_back({name, ok ? 1.0 : 0.0, "true", 1.0, ok}); }

bool Report::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void Report::merge(const std::string& prefix, Report&& sub) {
  for (auto& c : sub.checks) {
    c.name = prefix + "/" + c.name;
    checks.push_back(std::move(c));
  }
  results[prefix] = std::move(sub.results);
  if (!sub.exact.empty()) exact[prefix] = std::move(sub.exact);
  for (auto& [file, table] : sub.tables) tables[prefix + "_" + file] = std::move(table);
}

json Report::checks_json() const {
  json out = json::array();
  for (const auto& c : checks) {
    json j{{"name", c.name}, {"pass", c.pass}};
    if (c.relation != "true") {
      j["value"] = number(c.value);
      j["relation"] = c.relation;
      j["threshold"] = number(c.threshold);
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::string exact_hash(const json& exact) {
  const std::string text = exact.dump();
  boost::uuids::detail::sha1 sha;
  sha.process_bytes(text.data(), text.size());
  boost::uuids::detail::sha1::digest_type digest;
  sha.get_digest(digest);
  std::ostringstream os;
  for (unsigned word : digest) os << std::hex << std::setw(8) << std::setfill('0') << word;
  return os.str();
}

json document(const json& config, const Report& report) {
  json doc;
  doc["schema"] = kSchema;
  doc["config"] = config;
  doc["provenance"] = {{"version", KAHLERLAB_VERSION}, {"timestamp", utc_timestamp()}, {"compiler", __VERSION__}};
  doc["results"] = report.results;
  doc["checks"] = report.checks_json();
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.pass ? 0 : 1;
  doc["summary"] = {{"pass", report.pass()}, {"checks", report.checks.size()}, {"failed", failed}};
  doc["exact"] = report.exact;
  doc["exact_hash"] = exact_hash(report.exact);
  return doc;
}

std::vector<std::string> write_outputs(const std::string& dir, const std::string& stem, const json& doc,
                                       const Report& report) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  const std::string json_path = (std::filesystem::path(dir) / (stem + ".json")).string();
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write " + json_path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + json_path);
  paths.push_back(json_path);
  for (const auto& [file, table] : report.tables) {
    const std::string p = (std::filesystem::path(dir) / file).string();
    table.write(p);
    paths.push_back(p);
  }
  return paths;
}

}  // namespace kahlerlab::app
