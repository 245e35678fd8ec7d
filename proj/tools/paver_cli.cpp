// paver: command-line driver. Talks to the library through the C API only.
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "paver/paver.h"

namespace {

struct Options {
  std::string program, vuln, suite, mode = "auto", out;
  uint64_t cap = 10000;
  int64_t max_steps = 1000000;
  unsigned jobs = 1;
  uint64_t seed = 1;
  bool json = false;
};

void add_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--program", o.program, "MiniLang source (.mini) or graph document (.json)")
      ->required();
  cmd->add_option("--vuln", o.vuln, "vulnerability spec (JSON)");
  cmd->add_option("--suite", o.suite, "test suite file");
  cmd->add_option("--mode", o.mode, "input kind")
      ->check(CLI::IsMember({"auto", "minilang", "graph"}));
  cmd->add_option("--out", o.out, "directory for the report files");
  cmd->add_option("--cap", o.cap, "explicit path/chain enumeration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-steps", o.max_steps, "interpreter step limit per run")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "parallel patch evaluations")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "seed for the fuzzed mitigation check");
  cmd->add_flag("--json", o.json, "print the JSON report instead of the text summary");
}

int fail(paver_status s) {
  std::cerr << "paver: " << paver_last_error() << "\n";
  return static_cast<int>(s);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Path-wise vulnerability mitigation patching for MiniLang programs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", paver_version());

  Options o;
  using Phase = paver_status (*)(const paver_config *, paver_result **);
  Phase phase = nullptr;
  const struct {
    const char *name;
    const char *help;
    Phase fn;
  } commands[] = {
      {"analyze", "build the program path graph", paver_analyze},
      {"locate", "list candidate patch locations", paver_locate},
      {"evaluate", "synthesize, test and rank patches", paver_evaluate},
      {"all", "run every phase and write every report", paver_run_all},
  };
  for (const auto &c : commands) {
    CLI::App *sub = app.add_subcommand(c.name, c.help);
    add_flags(sub, o);
    sub->callback([&phase, fn = c.fn] { phase = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : PAVER_ERR_USAGE;
  }

  std::unique_ptr<paver_config, decltype(&paver_config_destroy)> cfg(paver_config_create(),
                                                                     paver_config_destroy);
  if (!cfg)
    return PAVER_ERR_INTERNAL;
  const paver_mode mode = o.mode == "graph"      ? PAVER_MODE_GRAPH
                          : o.mode == "minilang" ? PAVER_MODE_MINILANG
                                                 : PAVER_MODE_AUTO;
  paver_config_set_program(cfg.get(), o.program.c_str());
  paver_config_set_vuln(cfg.get(), o.vuln.c_str());
  paver_config_set_suite(cfg.get(), o.suite.c_str());
  paver_config_set_out(cfg.get(), o.out.c_str());
  paver_config_set_mode(cfg.get(), mode);
  for (paver_status s : {paver_config_set_cap(cfg.get(), o.cap),
                         paver_config_set_max_steps(cfg.get(), o.max_steps),
                         paver_config_set_jobs(cfg.get(), o.jobs),
                         paver_config_set_seed(cfg.get(), o.seed)})
    if (s != PAVER_OK)
      return fail(s);

  paver_result *raw = nullptr;
  const paver_status s = phase(cfg.get(), &raw);
  if (s != PAVER_OK)
    return fail(s);
  std::unique_ptr<paver_result, decltype(&paver_result_destroy)> result(raw,
                                                                        paver_result_destroy);
  std::cout << (o.json ? paver_result_json(result.get()) : paver_result_text(result.get()));
  for (size_t i = 0; i < paver_result_file_count(result.get()); ++i)
    std::cerr << "wrote " << paver_result_file(result.get(), i) << "\n";
  return 0;
}
