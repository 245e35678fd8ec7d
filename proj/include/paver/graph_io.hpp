#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paver/eval_harness.hpp"
#include "paver/patch_locator.hpp"
#include "paver/path_analysis.hpp"

namespace paver {

constexpr int kGraphSchemaVersion = 1;
constexpr int kReportSchemaVersion = 1;

struct GraphImport {
  IRProgram program; // not executable
  std::optional<VulnerabilityRequest> vulnerable;
};

/// Reads a program.graph.json document. Blocks keep their document ids as
/// labels and are numbered in listing order. Control dependencies are never
/// read; they are recomputed by the analyses. Throws paver::Error (Input)
/// naming the offending field.
GraphImport import_graph(const std::string &json_text, const std::string &path = "<graph>");
GraphImport load_graph(const std::string &path);

/// Structural export: statements become opaque ids, calls through references
/// are written out as their resolved edges.
std::string export_graph(const IRProgram &p, const std::optional<VulnerabilitySpec> &v = {});

/// Phase 1 output: chains, per-frame blocks with conditional labels, edges,
/// governing dependencies, and the explicit paths when within `cap`.
std::string path_graph_json(const IRProgram &p, const ProgramPathGraph &ppg,
                            const Diagnostics &diags, std::size_t cap);

/// Phase 2 output.
std::string candidates_json(const IRProgram &p, const ProgramPathGraph &ppg,
                            const std::vector<CandidatePatchLocation> &locs,
                            const Diagnostics &diags);

/// All-path mitigation check of the full candidate set.
struct MitigationCheck {
  bool static_cut = false; // vulnerable block unreachable with every candidate removed
  std::uint64_t seed = 0;
  int fuzz_runs = 0;
  int fuzz_faults = 0; // runs of the fully patched program faulting at the vulnerability
};

struct ReportMeta {
  std::string program;
  VulnerabilitySpec vulnerable;
  int levels = 0; // most functions on any call chain
  std::optional<MitigationCheck> mitigation;
  Diagnostics diagnostics;
};

struct Report {
  std::string json;
  std::string text;
};

/// Final ranked report. `evals` must already be ranked.
Report export_report(const IRProgram &p, const std::vector<PatchEvaluation> &evals,
                     const ReportMeta &meta);

} // namespace paver
