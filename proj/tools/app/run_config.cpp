#include "app/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/criterion/criterion.hpp"
#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/library.hpp"

namespace kahlerlab::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw UsageError(key, "expected an integer, got '" + text + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out))
    throw UsageError(key, "expected a finite number, got '" + text + "'");
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

template <class T>
FieldSpec integer_field(std::string key, std::string help, T RunConfig::*member) {
  const std::string k = key;
  return {std::move(key), "INT", std::move(help),
          [k, member](RunConfig& c, const std::string& v) { c.*member = parse_integer<T>(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

FieldSpec real_field(std::string key, std::string help, double RunConfig::*member) {
  const std::string k = key;
  return {std::move(key), "REAL", std::move(help),
          [k, member](RunConfig& c, const std::string& v) { c.*member = parse_real(k, v); },
          [member](const RunConfig& c) { return format_real(c.*member); }};
}

FieldSpec text_field(std::string key, std::string type, std::string help, std::string RunConfig::*member) {
  return {std::move(key), std::move(type), std::move(help),
          [member](RunConfig& c, const std::string& v) { c.*member = trim(v); },
          [member](const RunConfig& c) { return c.*member; }};
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw UsageError(key, message);
}

void check_potential_name(const std::string& key, const std::string& value, int n, bool allow_fs) {
  if (value.empty()) return;
  if (allow_fs && value == "fs") return;
  if (value.rfind("csv:", 0) == 0) {
    require(n <= 2, key, "grid potentials are supported for n <= 2");
    require(std::filesystem::exists(value.substr(4)), key, "file not found: " + value.substr(4));
    return;
  }
  const auto names = toric::library_names();
  if (std::find(names.begin(), names.end(), value) == names.end()) {
    std::string list;
    for (const auto& nm : names) list += (list.empty() ? "" : ", ") + nm;
    throw UsageError(key, "unknown potential '" + value + "' (library: " + list + ", or csv:PATH)");
  }
}

int max_power(int n) { return n == 1 ? 4 : (n == 2 ? 2 : 1); }

criterion::Rational rational_field(const std::string& key, const std::string& value) {
  try {
    return criterion::parse_rational(value);
  } catch (const InvalidArgument& e) {
    throw UsageError(key, e.what());
  }
}

}  // namespace

int RunConfig::dim() const {
  if (model == "cp1") return 1;
  if (model == "cp2") return 2;
  if (model == "cp3") return 3;
  throw UsageError("model", "unknown model '" + model + "' (expected cp1, cp2 or cp3)");
}

const std::vector<std::pair<std::string, std::string>>& commands() {
  static const std::vector<std::pair<std::string, std::string>> list{
      {"identities", "Residual matrix of the energy expansion identities over the potential library"},
      {"functionals", "I_k, I, J, identity residuals, inequality slacks and I_k stability"},
      {"bergman", "Bergman kernel normalisation, approximation gaps and the eigenvalue-control probe"},
      {"alpha", "Alpha-invariant estimate by threshold search over section subspaces"},
      {"continuity", "Continuity path solve with tracked functionals, identities and estimates"},
      {"criterion", "Exact alpha-invariants criterion verdict, parameters and coefficient report"},
      {"suite", "Full acceptance battery"},
  };
  return list;
}

const std::vector<FieldSpec>& config_fields() {
  static const std::vector<FieldSpec> fields{
      text_field("config", "FILE", "Flat key = value config file; explicit flags override it", &RunConfig::config),
      text_field("model", "cpN", "Model CP^n: cp1, cp2 or cp3", &RunConfig::model),
      text_field("perturbation", "NAME", "Reference perturbation: library name, csv:PATH, or fs", &RunConfig::perturbation),
      text_field("potential", "NAME", "Potential argument: library name or csv:PATH; empty means the whole library",
                 &RunConfig::potential),
      integer_field("level", "Quadrature refinement level (0..3)", &RunConfig::level),
      integer_field("nodes", "Gauss nodes per axis; 0 selects 64 (n <= 2) or 32 (n = 3)", &RunConfig::nodes),
      integer_field("m", "Power of the anticanonical bundle", &RunConfig::m),
      integer_field("k", "Subspace dimension (alpha), functional index (functionals) or estimate index (continuity)",
                    &RunConfig::k),
      integer_field("degree", "Continuity polynomial degree; 0 selects 40 (n = 1) or 30 (n = 2)", &RunConfig::degree),
      real_field("dt", "Continuity step in t", &RunConfig::dt),
      real_field("delta", "Continuity path stops at 1 - delta", &RunConfig::delta),
      real_field("tolerance", "Monge-Ampere residual tolerance", &RunConfig::tolerance),
      integer_field("budget", "Alpha search budget (monomial subspaces)", &RunConfig::budget),
      integer_field("probes", "Alpha random-coefficient probe subspaces", &RunConfig::probes),
      integer_field("samples", "Seeded random draws: extra potentials (identities, default 4), pairs (functionals, 100), subspaces (bergman, 50)",
                    &RunConfig::samples),
      integer_field("probe", "Bergman eigenvalue-control probe index k (0 disables the probe)", &RunConfig::probe),
      text_field("rays", "FILE", "Bergman probe rays: CSV, one exponent vector per row", &RunConfig::rays),
      integer_field("random-rays", "Seeded Gaussian probe rays added to the coordinate rays", &RunConfig::random_rays),
      real_field("s-max", "Largest probe ray parameter s", &RunConfig::s_max),
      real_field("s-step", "Probe ray parameter step", &RunConfig::s_step),
      integer_field("n", "Criterion dimension; 0 takes it from the model", &RunConfig::n),
      text_field("alpha1", "RATIONAL", "alpha_{m,1} as p/q or decimal", &RunConfig::alpha1),
      text_field("alphak", "RATIONAL", "alpha_{m,k} as p/q or decimal", &RunConfig::alphak),
      text_field("lambda", "RATIONAL", "Eigenvalue-control constant Lambda >= 1 (optional)", &RunConfig::lambda),
      text_field("only", "LIST", "Suite: comma-separated criterion numbers to run", &RunConfig::only),
      text_field("out", "DIR", "Output directory (environment override: KAHLERLAB_OUT)", &RunConfig::out),
      integer_field("seed", "Random seed for probes, subspaces and sampled potentials", &RunConfig::seed),
  };
  return fields;
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : config_fields())
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw UsageError(key, "unknown configuration key");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config", path + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") throw UsageError("config", "config files cannot include other config files");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const std::string& command, const std::map<std::string, std::string>& flags) {
  RunConfig cfg;
  cfg.command = command;
  if (const auto it = flags.find("config"); it != flags.end()) {
    cfg.config = it->second;
    for (const auto& [k, v] : read_config_file(cfg.config)) set_field(cfg, k, v);
  }
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') cfg.out = env;
  for (const auto& [k, v] : flags) set_field(cfg, k, v);
  return cfg;
}

void validate(const RunConfig& cfg) {
  const auto& cmds = commands();
  require(std::any_of(cmds.begin(), cmds.end(), [&](const auto& c) { return c.first == cfg.command; }), "command",
          "unknown command '" + cfg.command + "'");
  const int n = cfg.dim();
  require(cfg.level >= 0 && cfg.level <= 3, "level", "must lie in 0..3");
  require(cfg.nodes == 0 || (cfg.nodes >= 4 && cfg.nodes <= 256), "nodes", "must be 0 or lie in 4..256");
  require(!cfg.out.empty(), "out", "must not be empty");
  check_potential_name("perturbation", cfg.perturbation, n, true);
  check_potential_name("potential", cfg.potential, n, false);
  require(cfg.samples >= 0 && cfg.samples <= 100000, "samples", "must lie in 0..100000");
  const std::string& c = cfg.command;
  if (c == "functionals") {
    require(cfg.k == 0 || (cfg.k >= 2 && cfg.k <= n + 1), "k", "must be 0 or lie in 2..n+1");
  } else if (c == "bergman" || c == "alpha") {
    require(cfg.m >= 1 && cfg.m <= max_power(n), "m",
            "must lie in 1.." + std::to_string(max_power(n)) + " for " + cfg.model);
    const auto big_n = static_cast<int>(bergman::section_count(n, cfg.m));
    if (c == "bergman") {
      require(cfg.probe == 0 || (cfg.probe >= 2 && cfg.probe <= big_n), "probe",
              "must be 0 or lie in 2.." + std::to_string(big_n));
      require(cfg.s_max > 0.0 && cfg.s_max <= 60.0, "s-max", "must lie in (0, 60]");
      require(cfg.s_step > 0.0 && cfg.s_step <= cfg.s_max, "s-step", "must lie in (0, s-max]");
      require(cfg.random_rays >= 0 && cfg.random_rays <= 10000, "random-rays", "must lie in 0..10000");
      require(cfg.rays.empty() || std::filesystem::exists(cfg.rays), "rays", "file not found: " + cfg.rays);
    } else {
      require(cfg.k == 0 || (cfg.k >= 1 && cfg.k <= big_n), "k", "must lie in 1.." + std::to_string(big_n));
      require(cfg.budget >= 1, "budget", "must be positive");
      require(cfg.probes >= 0 && cfg.probes <= 1000, "probes", "must lie in 0..1000");
    }
  } else if (c == "continuity") {
    require(n <= 2, "model", "continuity paths are supported for cp1 and cp2");
    require(cfg.dt > 0.0 && cfg.dt <= 0.5, "dt", "must lie in (0, 0.5]");
    require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta", "must lie in (0, 1)");
    require(cfg.m >= 0 && cfg.m <= max_power(n), "m", "must lie in 0.." + std::to_string(max_power(n)));
    require(cfg.degree == 0 || (cfg.degree >= 4 && cfg.degree <= 120), "degree", "must be 0 or lie in 4..120");
    require(cfg.tolerance >= 1e-14 && cfg.tolerance <= 1e-4, "tolerance", "must lie in [1e-14, 1e-4]");
    require(cfg.k == 0 || (cfg.k >= 2 && cfg.k <= n), "k", "must be 0 or lie in 2..n (needs cp2)");
    for (const auto& [key, value] : {std::pair{"alpha1", cfg.alpha1}, std::pair{"alphak", cfg.alphak}})
      if (!value.empty()) require(rational_field(key, value) > 0, key, "must be positive");
    if (!cfg.lambda.empty()) require(rational_field("lambda", cfg.lambda) >= 1, "lambda", "must be >= 1");
  } else if (c == "criterion") {
    const int cn = cfg.n != 0 ? cfg.n : n;
    require(cn >= 2 && cn <= 64, "n", "must lie in 2..64");
    require(cfg.k >= 2 && cfg.k <= cn, "k", "must lie in 2..n");
    for (const auto& [key, value] : {std::pair{"alpha1", cfg.alpha1}, std::pair{"alphak", cfg.alphak}}) {
      require(!value.empty(), key, "is required");
      const auto q = rational_field(key, value);
      require(q > 0 && q <= criterion::kAlphaMax, key, "must lie in (0, 3]");
    }
    if (!cfg.lambda.empty()) require(rational_field("lambda", cfg.lambda) >= 1, "lambda", "must be >= 1");
  } else if (c == "suite") {
    std::stringstream ss(cfg.only);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const int id = parse_integer<int>("only", item);
      require(id >= 1 && id <= 10, "only", "criterion numbers lie in 1..10");
    }
  }
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  j["command"] = cfg.command;
  for (const auto& f : config_fields()) j[f.key] = f.get(cfg);
  return j;
}

}  // namespace kahlerlab::app
