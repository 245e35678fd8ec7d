#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "paver/analysis.hpp"
#include "paver/error.hpp"
#include "paver/interpreter.hpp"
#include "paver/ir.hpp"

namespace paver {

constexpr std::size_t kDefaultEnumerationCap = 10'000;

struct VulnerabilitySpec {
  FunctionId function;
  StatementId statement = 0;

  struct ExploitInput {
    std::vector<std::int64_t> input;
    FaultKind kind = FaultKind::Oob;
  };
  std::optional<ExploitInput> exploit;
};

/// How a user names the vulnerable location before it is resolved against
/// a program: by statement id, by source line inside a function, or by the
/// function alone (which resolves to its entry statement).
struct VulnerabilityRequest {
  FunctionId function;
  std::optional<StatementId> statement;
  std::optional<int> line;
  std::optional<VulnerabilitySpec::ExploitInput> exploit;
};

VulnerabilityRequest parse_vulnerability_request(const std::string &json_text,
                                                 const std::string &path = "<vuln>");
VulnerabilityRequest load_vulnerability_request(const std::string &path);

/// Resolves a request to a concrete statement and checks that it belongs to
/// a non-external function. Throws paver::Error (Analysis) otherwise.
VulnerabilitySpec resolve_vulnerability(const IRProgram &p, const VulnerabilityRequest &req);

struct Frame {
  FunctionId function;
  std::optional<StatementId> call_site; // absent for the vulnerable frame

  auto operator<=>(const Frame &) const = default;
};

/// Entry function first, vulnerable function last. FunctionId-acyclic.
struct CallChain {
  std::vector<Frame> frames;

  auto operator<=>(const CallChain &) const = default;
};

/// All FunctionId-acyclic caller chains entry -> ... -> vuln_fn, in
/// lexicographic frame order. An unreachable vulnerable function yields an
/// empty list and an "unreachable-vulnerability" diagnostic. More than `cap`
/// chains is an analysis error.
std::vector<CallChain> find_call_chains(const CallGraph &cg, const FunctionId &vuln_fn,
                                        const FunctionId &entry,
                                        Diagnostics *diags = nullptr,
                                        std::size_t cap = kDefaultEnumerationCap);

struct DagEdge {
  BlockId from = 0;
  BlockId to = 0;
  int branch = 0;

  auto operator<=>(const DagEdge &) const = default;
};

/// The blocks and edges lying on some acyclic from -> to path. Back edges
/// (retreating edges of a depth-first walk from the function entry) never
/// belong to it. Empty when `to` is unreachable.
struct PathDag {
  BlockId from = 0;
  BlockId to = 0;
  std::vector<BlockId> nodes; // sorted
  std::vector<DagEdge> edges; // sorted

  bool empty() const { return nodes.empty(); }
  bool contains(BlockId b) const;
  std::vector<DagEdge> out_edges(BlockId b) const;
  std::uint64_t path_count() const; // saturating
};

PathDag intraprocedural_paths(const IRFunction &f, BlockId from, BlockId to);

struct FramePaths {
  FunctionId function;
  std::optional<StatementId> call_site;
  BlockId target = 0;
  int level = 0; // 0 = vulnerable function
  PathDag dag;
  std::set<std::pair<BlockId, int>> governing; // transitive control deps of target
};

struct ChainPaths {
  CallChain chain;
  std::vector<FramePaths> frames;
};

struct PathStep {
  FunctionId function;
  BlockId block = 0;
  std::optional<StatementId> call_site; // set where the path descends into a callee

  auto operator<=>(const PathStep &) const = default;
};

using ProgramPath = std::vector<PathStep>;

struct ProgramPathGraph {
  VulnerabilitySpec vuln;
  BlockId vuln_block = 0;
  std::vector<ChainPaths> chains;
  std::map<std::pair<FunctionId, BlockId>, bool> conditional; // label per member block

  bool empty() const { return chains.empty(); }
  std::uint64_t path_count() const; // saturating
  std::size_t max_levels() const;   // most functions on any chain

  /// Explicit maximal paths. Throws paver::Error (Analysis) when more than
  /// `cap` exist; use the DAG form in that case.
  std::vector<ProgramPath> enumerate_paths(std::size_t cap = kDefaultEnumerationCap) const;

  bool contains(const FunctionId &f, BlockId b) const;
};

ProgramPathGraph build_program_path_graph(const IRProgram &p, const VulnerabilitySpec &v,
                                          Diagnostics *diags = nullptr,
                                          std::size_t cap = kDefaultEnumerationCap);

std::string to_string(const ProgramPath &path, const IRProgram &p);

/// Interprocedural reachability of the vulnerable block from the program
/// entry once the `removed` blocks are deleted. A block that is reached makes
/// every callee of its call sites reachable.
bool reaches_vulnerability(const IRProgram &p, const VulnerabilitySpec &v,
                           const std::set<std::pair<FunctionId, BlockId>> &removed = {});

} // namespace paver
