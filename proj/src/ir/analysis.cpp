#include "paver/analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace paver {

bool PostDomTree::postdominates(int a, int b) const {
  for (int x = b;; x = ipdom[static_cast<std::size_t>(x)]) {
    if (x == a)
      return true;
    if (x == exit || x < 0)
      return false;
  }
}

namespace {

// Successor lists of the exit-augmented graph: blocks plus node `n` = exit.
std::vector<std::vector<int>> augmented_successors(const IRFunction &fn,
                                                   Diagnostics *diags) {
  const int n = static_cast<int>(fn.blocks.size());
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n + 1));
  for (const auto &b : fn.blocks) {
    auto &s = succ[static_cast<std::size_t>(b.id)];
    for (BlockId t : b.successors())
      s.push_back(t);
    if (b.term.kind == TermKind::Return || b.term.kind == TermKind::Halt)
      s.push_back(n);
  }

  // Reverse reachability from the exit.
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(n + 1));
  for (int v = 0; v < n; ++v)
    for (int t : succ[static_cast<std::size_t>(v)])
      pred[static_cast<std::size_t>(t)].push_back(v);
  std::vector<char> reaches(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> stack{n};
  reaches[static_cast<std::size_t>(n)] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int p : pred[static_cast<std::size_t>(v)])
      if (!reaches[static_cast<std::size_t>(p)]) {
        reaches[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
  }
  for (int v = 0; v < n; ++v) {
    if (!reaches[static_cast<std::size_t>(v)]) {
      succ[static_cast<std::size_t>(v)].push_back(n);
      warn(diags, "no-exit",
           fn.id + ": block " + fn.block(v).label +
               " cannot reach a return; attached to the synthetic exit");
    }
  }
  return succ;
}

} // namespace

std::vector<int> immediate_dominators(const std::vector<std::vector<int>> &succ,
                                      int root) {
  const std::size_t n = succ.size();
  std::vector<std::vector<int>> pred(n);
  for (std::size_t v = 0; v < n; ++v)
    for (int t : succ[v])
      pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(v));

  std::vector<int> po_index(n, -1);
  std::vector<int> order; // reverse postorder
  {
    std::vector<char> seen(n, 0);
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen[static_cast<std::size_t>(root)] = 1;
    std::vector<int> post;
    while (!stack.empty()) {
      auto &[v, i] = stack.back();
      const auto &next = succ[static_cast<std::size_t>(v)];
      if (i < next.size()) {
        int w = next[i++];
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        post.push_back(v);
        stack.pop_back();
      }
    }
    for (std::size_t i = 0; i < post.size(); ++i)
      po_index[static_cast<std::size_t>(post[i])] = static_cast<int>(i);
    order.assign(post.rbegin(), post.rend());
  }

  std::vector<int> idom(n, -1);
  idom[static_cast<std::size_t>(root)] = root;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (po_index[static_cast<std::size_t>(a)] < po_index[static_cast<std::size_t>(b)])
        a = idom[static_cast<std::size_t>(a)];
      while (po_index[static_cast<std::size_t>(b)] < po_index[static_cast<std::size_t>(a)])
        b = idom[static_cast<std::size_t>(b)];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int v : order) {
      if (v == root)
        continue;
      int new_idom = -1;
      for (int p : pred[static_cast<std::size_t>(v)]) {
        if (idom[static_cast<std::size_t>(p)] == -1)
          continue;
        new_idom = new_idom == -1 ? p : intersect(p, new_idom);
      }
      if (new_idom != idom[static_cast<std::size_t>(v)]) {
        idom[static_cast<std::size_t>(v)] = new_idom;
        changed = true;
      }
    }
  }
  return idom;
}

PostDomTree compute_postdominators(const IRFunction &fn, Diagnostics *diags) {
  const int n = static_cast<int>(fn.blocks.size());
  const auto succ = augmented_successors(fn, diags);
  std::vector<std::vector<int>> reversed(static_cast<std::size_t>(n + 1));
  for (int v = 0; v <= n; ++v)
    for (int t : succ[static_cast<std::size_t>(v)])
      reversed[static_cast<std::size_t>(t)].push_back(v);
  return PostDomTree{immediate_dominators(reversed, n), n};
}

std::vector<ControlDep> ControlDepGraph::governors_of(BlockId b) const {
  std::vector<ControlDep> out;
  for (const auto &d : deps)
    if (d.governed == b)
      out.push_back(d);
  return out;
}

std::set<std::pair<BlockId, int>>
ControlDepGraph::transitive_governors(BlockId b) const {
  std::set<std::pair<BlockId, int>> out;
  std::set<BlockId> visited{b};
  std::vector<BlockId> work{b};
  while (!work.empty()) {
    BlockId x = work.back();
    work.pop_back();
    for (const auto &d : deps) {
      if (d.governed != x)
        continue;
      out.insert({d.governor, d.branch});
      if (visited.insert(d.governor).second)
        work.push_back(d.governor);
    }
  }
  return out;
}

bool ControlDepGraph::is_governed(BlockId b) const {
  return std::any_of(deps.begin(), deps.end(),
                     [&](const ControlDep &d) { return d.governed == b; });
}

ControlDepGraph compute_control_dependencies(const IRFunction &fn,
                                             const PostDomTree &pdt) {
  ControlDepGraph g;
  for (const auto &a : fn.blocks) {
    if (!a.is_conditional())
      continue;
    const int stop = pdt.ipdom[static_cast<std::size_t>(a.id)];
    auto succ = a.successors();
    for (int k = 0; k < 2; ++k) {
      for (int runner = succ[static_cast<std::size_t>(k)];
           runner != stop && runner != pdt.exit;
           runner = pdt.ipdom[static_cast<std::size_t>(runner)]) {
        g.deps.push_back({runner, a.id, k});
      }
    }
  }
  std::sort(g.deps.begin(), g.deps.end());
  g.deps.erase(std::unique(g.deps.begin(), g.deps.end()), g.deps.end());
  return g;
}

ControlDepGraph compute_control_dependencies(const IRFunction &fn,
                                             Diagnostics *diags) {
  return compute_control_dependencies(fn, compute_postdominators(fn, diags));
}

std::vector<CallEdge> CallGraph::callers_of(const FunctionId &f) const {
  std::vector<CallEdge> out;
  for (const auto &e : edges)
    if (e.callee == f)
      out.push_back(e);
  return out;
}

std::vector<CallEdge> CallGraph::callees_of(const FunctionId &f) const {
  std::vector<CallEdge> out;
  for (const auto &e : edges)
    if (e.caller == f)
      out.push_back(e);
  return out;
}

CallGraph build_call_graph(const IRProgram &p) {
  CallGraph g;
  std::vector<const IRFunction *> address_taken;
  for (const auto &[name, fn] : p.functions)
    if (fn.address_taken)
      address_taken.push_back(&fn);

  auto add_site = [&](const FunctionId &caller, const Statement &s) {
    for (const auto &c : s.calls) {
      if (!c.via_reference) {
        if (!p.find(c.callee))
          throw_analysis(caller + ": call to undeclared function '" + c.callee +
                         "' at statement " + std::to_string(s.id));
        g.edges.push_back({caller, s.id, c.callee, false});
        continue;
      }
      for (const auto *target : address_taken)
        if (target->signature() == c.ref_type)
          g.edges.push_back({caller, s.id, target->id, true});
    }
  };
  for (const auto &[name, fn] : p.functions) {
    for (const auto &b : fn.blocks) {
      for (const auto &s : b.statements)
        add_site(name, s);
      if (b.term.stmt)
        add_site(name, *b.term.stmt);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::vector<BlockId> call_site_blocks(const IRFunction &fn) {
  std::vector<BlockId> out;
  for (const auto &b : fn.blocks) {
    bool has = std::any_of(b.statements.begin(), b.statements.end(),
                           [](const Statement &s) { return !s.calls.empty(); });
    if (b.term.stmt && !b.term.stmt->calls.empty())
      has = true;
    if (has)
      out.push_back(b.id);
  }
  return out;
}

} // namespace paver
