#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "app/commands.hpp"
#include "app/report.hpp"
#include "app/run_config.hpp"
#include "kahlerlab/error.hpp"

namespace app = kahlerlab::app;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int report_error(const std::string& type, const std::string& message, const std::string& field = "") {
  nlohmann::json err{{"schema", app::kSchema}, {"error", {{"type", type}, {"message", message}}}};
  if (!field.empty()) err["error"]["field"] = field;
  std::cerr << err.dump(2) << '\n';
  return type == "usage" ? kExitUsage : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"kahlerlab: numerical laboratory for energy functionals, Bergman kernels, alpha-invariants and "
               "the continuity method on toric Fano models CP^n.\n"
               "Precedence: flags > " + std::string(app::kOutEnv) + " (out only) > --config file > defaults.\n"
               "Exit codes: 0 all checks pass, 1 a check failed or a module error, 2 usage error."};
  cli.require_subcommand(1);
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  for (const auto& f : app::config_fields()) {
    auto* opt = cli.add_option("--" + f.key, raw[f.key], f.help)->type_name(f.type);
    options[f.key] = opt;
  }
  for (const auto& [name, help] : app::commands()) cli.add_subcommand(name, help)->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kExitUsage;
  }

  std::map<std::string, std::string> flags;
  for (const auto& [key, opt] : options)
    if (opt->count() > 0) flags[key] = raw[key];
  const std::string command = cli.get_subcommands().front()->get_name();

  try {
    const app::RunConfig cfg = app::resolve_config(command, flags);
    const app::Report rep = app::dispatch(cfg);
    const auto doc = app::document(app::to_json(cfg), rep);
    const auto paths = app::write_outputs(cfg.out, cfg.command, doc, rep);
    nlohmann::json brief = doc;
    brief["outputs"] = paths;
    std::cout << brief.dump(2) << '\n';
    return rep.pass() ? kExitPass : kExitFail;
  } catch (const app::UsageError& e) {
    return report_error("usage", e.what(), e.field());
  } catch (const kahlerlab::InvalidArgument& e) {
    return report_error("invalid_argument", e.what());
  } catch (const kahlerlab::Error& e) {
    return report_error("module", e.what());
  } catch (const std::exception& e) {
    return report_error("io", e.what());
  }
}
