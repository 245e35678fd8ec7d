#pragma once

#include <set>
#include <tuple>
#include <vector>

#include "paver/error.hpp"
#include "paver/ir.hpp"

namespace paver {

/// Immediate postdominator tree over a function's blocks plus one synthetic
/// exit node (index `exit`, equal to the number of blocks). Every return and
/// halt block has an edge to the exit; blocks that cannot reach it (infinite
/// loops) are attached to it as well.
struct PostDomTree {
  std::vector<int> ipdom; // size blocks + 1; ipdom[exit] == exit
  int exit = 0;

  bool postdominates(int a, int b) const; // reflexive
};

/// Immediate dominators of a graph given as successor lists, rooted at
/// `root` (Cooper-Harvey-Kennedy). idom[root] == root; unreachable nodes -1.
std::vector<int> immediate_dominators(const std::vector<std::vector<int>> &succ,
                                      int root);

PostDomTree compute_postdominators(const IRFunction &fn,
                                   Diagnostics *diags = nullptr);

struct ControlDep {
  BlockId governed = 0;
  BlockId governor = 0;
  int branch = 0; // 0 = then / taken edge, 1 = else / fall-through edge

  auto operator<=>(const ControlDep &) const = default;
};

/// Direct control dependencies, sorted by (governed, governor, branch).
struct ControlDepGraph {
  std::vector<ControlDep> deps;

  std::vector<ControlDep> governors_of(BlockId b) const;

  /// Transitive closure of the governors of `b` along dependence edges.
  std::set<std::pair<BlockId, int>> transitive_governors(BlockId b) const;

  bool is_governed(BlockId b) const;
};

ControlDepGraph compute_control_dependencies(const IRFunction &fn,
                                             const PostDomTree &pdt);
ControlDepGraph compute_control_dependencies(const IRFunction &fn,
                                             Diagnostics *diags = nullptr);

struct CallEdge {
  FunctionId caller;
  StatementId call_site = 0;
  FunctionId callee;
  bool via_reference = false;

  auto operator<=>(const CallEdge &) const = default;
};

/// Sorted, duplicate-free call edges. Calls through function references fan
/// out to every address-taken function whose signature matches.
struct CallGraph {
  std::vector<CallEdge> edges;

  std::vector<CallEdge> callers_of(const FunctionId &f) const;
  std::vector<CallEdge> callees_of(const FunctionId &f) const;
};

CallGraph build_call_graph(const IRProgram &p);

/// Blocks of `fn` that contain a call (direct or indirect) to anything.
std::vector<BlockId> call_site_blocks(const IRFunction &fn);

} // namespace paver
