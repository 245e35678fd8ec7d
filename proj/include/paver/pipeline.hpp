#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paver/eval_harness.hpp"
#include "paver/graph_io.hpp"

namespace paver {

enum class InputMode { Auto, MiniLang, Graph };

std::optional<InputMode> parse_input_mode(const std::string &text);

struct RunConfig {
  std::string program;
  std::string vuln;  // required for MiniLang; graph documents may embed it
  std::string suite; // required for evaluate
  InputMode mode = InputMode::Auto;
  std::string out; // directory for the written reports; empty = write nothing
  std::size_t cap = kDefaultEnumerationCap;
  ExecutionLimits limits;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  int fuzz_runs = 100;
};

/// Checks the config invariants; throws paver::Error (Usage).
void validate(const RunConfig &cfg, bool needs_suite);

struct LoadedTarget {
  IRProgram program;
  VulnerabilitySpec vuln;
};

LoadedTarget load_target(const RunConfig &cfg);

struct PhaseOutput {
  std::string json;
  std::string text;
  Diagnostics diagnostics;
  std::vector<std::string> written; // files created under cfg.out
};

/// Phase 1: writes path_graph.json.
PhaseOutput cmd_analyze(const RunConfig &cfg);
/// Phases 1-2: writes candidates.json.
PhaseOutput cmd_locate(const RunConfig &cfg);
/// Phases 1-3: writes report.json and report.txt.
PhaseOutput cmd_evaluate(const RunConfig &cfg);
/// All three phases, every file.
PhaseOutput cmd_all(const RunConfig &cfg);

} // namespace paver
