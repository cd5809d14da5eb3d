#include <algorithm>
#include <cstdio>
#include <string>

#include "app/report.hpp"
#include "app/suite.hpp"

namespace app = kahlerlab::app;

// Runs the ten acceptance criteria through the same battery as `kahlerlab suite` and prints
// one line per criterion. Tolerances live with each criterion in the battery.
int main(int argc, char** argv) {
  app::RunConfig cfg = app::resolve_config("suite", {});
  cfg.seed = 7;
  cfg.out = argc > 1 ? argv[1] : "acceptance-out";
  const app::SuiteOutcome outcome = app::run_battery(cfg);
  const app::Report& rep = outcome.report;
  bool all = outcome.criteria.size() == 10;
  for (const auto& c : outcome.criteria) {
    std::printf("[%s] %2d %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
    all = all && c.pass;
    if (c.pass) continue;
    const std::string prefix = "criterion" + std::to_string(c.id) + "/";
    for (const auto& k : rep.checks)
      if (!k.pass && k.name.rfind(prefix, 0) == 0)
        std::printf("       %s: %.6g %s %.6g\n", k.name.c_str(), k.value, k.relation.c_str(), k.threshold);
  }
  app::write_outputs(cfg.out, cfg.command, app::document(app::to_json(cfg), rep), rep);
  std::printf("%s: %zu of 10 criteria pass\n", all ? "ACCEPTED" : "REJECTED",
              static_cast<std::size_t>(std::count_if(outcome.criteria.begin(), outcome.criteria.end(),
                                                     [](const auto& c) { return c.pass; })));
  return all ? 0 : 1;
}
