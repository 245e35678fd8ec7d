#include "paver/path_analysis.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace paver {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0)
    return 0;
  return a > std::numeric_limits<std::uint64_t>::max() / b
             ? std::numeric_limits<std::uint64_t>::max()
             : a * b;
}

} // namespace

VulnerabilityRequest parse_vulnerability_request(const std::string &json_text,
                                                 const std::string &path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw_input(path + ": " + e.what());
  }
  VulnerabilityRequest req;
  try {
    if (!doc.is_object() || !doc.contains("function"))
      throw_input(path + ": vulnerability spec needs a 'function' field");
    req.function = doc.at("function").get<std::string>();
    if (doc.contains("statement"))
      req.statement = doc.at("statement").get<StatementId>();
    if (doc.contains("line"))
      req.line = doc.at("line").get<int>();
    if (doc.contains("exploit")) {
      const auto &ex = doc.at("exploit");
      VulnerabilitySpec::ExploitInput e;
      e.input = ex.at("input").get<std::vector<std::int64_t>>();
      const std::string kind = ex.value("fault", std::string("oob"));
      auto k = parse_fault_kind(kind);
      if (!k)
        throw_input(path + ": unknown fault kind '" + kind + "'");
      e.kind = *k;
      req.exploit = std::move(e);
    }
  } catch (const nlohmann::json::exception &e) {
    throw_input(path + ": " + e.what());
  }
  return req;
}

VulnerabilityRequest load_vulnerability_request(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw_input("cannot read vulnerability spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_vulnerability_request(ss.str(), path);
}

VulnerabilitySpec resolve_vulnerability(const IRProgram &p, const VulnerabilityRequest &req) {
  const IRFunction *fn = p.find(req.function);
  if (!fn)
    throw_analysis("vulnerable function '" + req.function + "' does not exist");
  if (fn->is_external)
    throw_analysis("vulnerable function '" + req.function +
                   "' is external and cannot be patched");

  VulnerabilitySpec spec;
  spec.function = req.function;
  spec.exploit = req.exploit;

  auto all_statements = [&]() {
    std::vector<const Statement *> out;
    for (const auto &b : fn->blocks) {
      for (const auto &s : b.statements)
        out.push_back(&s);
      if (b.term.stmt)
        out.push_back(&*b.term.stmt);
    }
    return out;
  };

  if (req.statement) {
    auto loc = p.locate(*req.statement);
    if (!loc || loc->first != req.function)
      throw_analysis("statement " + std::to_string(*req.statement) +
                     " does not belong to function '" + req.function + "'");
    spec.statement = *req.statement;
    return spec;
  }
  if (req.line) {
    std::optional<StatementId> best;
    for (const Statement *s : all_statements())
      if (s->line == *req.line && (!best || s->id < *best))
        best = s->id;
    if (!best)
      throw_analysis("no statement of '" + req.function + "' at line " +
                     std::to_string(*req.line));
    spec.statement = *best;
    return spec;
  }
  const BasicBlock &entry = fn->block(fn->entry_block);
  if (!entry.statements.empty())
    spec.statement = entry.statements.front().id;
  else if (entry.term.stmt)
    spec.statement = entry.term.stmt->id;
  else
    throw_analysis("entry block of '" + req.function + "' has no statement to anchor on");
  return spec;
}

std::vector<CallChain> find_call_chains(const CallGraph &cg, const FunctionId &vuln_fn,
                                        const FunctionId &entry, Diagnostics *diags,
                                        std::size_t cap) {
  // Backward reachability: functions from which vuln_fn can be reached.
  std::set<FunctionId> reaches{vuln_fn};
  std::vector<FunctionId> work{vuln_fn};
  while (!work.empty()) {
    FunctionId f = work.back();
    work.pop_back();
    for (const auto &e : cg.edges)
      if (e.callee == f && reaches.insert(e.caller).second)
        work.push_back(e.caller);
  }

  std::vector<CallChain> chains;
  if (!reaches.count(entry)) {
    if (diags)
      diags->push_back({Diagnostic::Severity::Error, "unreachable-vulnerability",
                        "function '" + vuln_fn + "' is not reachable from '" + entry +
                            "'"});
    return chains;
  }

  std::map<FunctionId, std::vector<const CallEdge *>> out;
  for (const auto &e : cg.edges)
    if (reaches.count(e.callee))
      out[e.caller].push_back(&e);

  CallChain cur;
  std::set<FunctionId> on_chain;
  auto dfs = [&](auto &&self, const FunctionId &f) -> void {
    if (f == vuln_fn) {
      CallChain c = cur;
      c.frames.push_back({f, std::nullopt});
      chains.push_back(std::move(c));
      if (chains.size() > cap)
        throw_analysis("more than " + std::to_string(cap) + " call chains reach '" +
                       vuln_fn + "'; raise --cap");
      return;
    }
    on_chain.insert(f);
    for (const CallEdge *e : out[f]) {
      if (on_chain.count(e->callee))
        continue; // recursion collapses
      cur.frames.push_back({f, e->call_site});
      self(self, e->callee);
      cur.frames.pop_back();
    }
    on_chain.erase(f);
  };
  dfs(dfs, entry);
  std::sort(chains.begin(), chains.end());
  chains.erase(std::unique(chains.begin(), chains.end()), chains.end());
  return chains;
}

bool PathDag::contains(BlockId b) const {
  return std::binary_search(nodes.begin(), nodes.end(), b);
}

std::vector<DagEdge> PathDag::out_edges(BlockId b) const {
  std::vector<DagEdge> out;
  for (const auto &e : edges)
    if (e.from == b)
      out.push_back(e);
  return out;
}

std::uint64_t PathDag::path_count() const {
  if (nodes.empty())
    return 0;
  // Memoized count of to-paths from each node.
  std::map<BlockId, std::uint64_t> memo;
  auto count = [&](auto &&self, BlockId b) -> std::uint64_t {
    if (b == to)
      return 1;
    if (auto it = memo.find(b); it != memo.end())
      return it->second;
    std::uint64_t n = 0;
    for (const auto &e : edges)
      if (e.from == b)
        n = sat_add(n, self(self, e.to));
    memo[b] = n;
    return n;
  };
  return count(count, from);
}

PathDag intraprocedural_paths(const IRFunction &f, BlockId from, BlockId to) {
  PathDag dag;
  dag.from = from;
  dag.to = to;
  const auto n = f.blocks.size();
  if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= n ||
      static_cast<std::size_t>(to) >= n)
    throw_analysis(f.id + ": path endpoints outside the function");

  // Retreating edges of an iterative DFS from the function entry.
  std::set<std::pair<BlockId, int>> back; // (from block, branch index)
  {
    std::vector<int> state(n, 0); // 0 new, 1 on stack, 2 done
    std::vector<std::pair<BlockId, std::size_t>> stack;
    auto visit = [&](BlockId root) {
      if (state[static_cast<std::size_t>(root)])
        return;
      state[static_cast<std::size_t>(root)] = 1;
      stack.push_back({root, 0});
      while (!stack.empty()) {
        auto &[v, i] = stack.back();
        auto succ = f.block(v).successors();
        if (i < succ.size()) {
          const int k = static_cast<int>(i++);
          BlockId w = succ[static_cast<std::size_t>(k)];
          if (state[static_cast<std::size_t>(w)] == 1)
            back.insert({v, k});
          else if (state[static_cast<std::size_t>(w)] == 0) {
            state[static_cast<std::size_t>(w)] = 1;
            stack.push_back({w, 0});
          }
        } else {
          state[static_cast<std::size_t>(v)] = 2;
          stack.pop_back();
        }
      }
    };
    visit(f.entry_block);
    // Dead regions are walked afterwards so their cycles are cut as well.
    for (std::size_t b = 0; b < n; ++b)
      visit(static_cast<BlockId>(b));
  }

  std::vector<DagEdge> all;
  for (const auto &b : f.blocks) {
    auto succ = b.successors();
    for (int k = 0; k < static_cast<int>(succ.size()); ++k)
      if (!back.count({b.id, k}))
        all.push_back({b.id, succ[static_cast<std::size_t>(k)], k});
  }

  std::vector<char> fwd(n, 0), bwd(n, 0);
  {
    std::vector<BlockId> work{from};
    fwd[static_cast<std::size_t>(from)] = 1;
    while (!work.empty()) {
      BlockId v = work.back();
      work.pop_back();
      if (v == to)
        continue; // paths end at the target
      for (const auto &e : all)
        if (e.from == v && !fwd[static_cast<std::size_t>(e.to)]) {
          fwd[static_cast<std::size_t>(e.to)] = 1;
          work.push_back(e.to);
        }
    }
  }
  if (!fwd[static_cast<std::size_t>(to)])
    return dag;
  {
    std::vector<BlockId> work{to};
    bwd[static_cast<std::size_t>(to)] = 1;
    while (!work.empty()) {
      BlockId v = work.back();
      work.pop_back();
      if (v == from)
        continue;
      for (const auto &e : all)
        if (e.to == v && !bwd[static_cast<std::size_t>(e.from)]) {
          bwd[static_cast<std::size_t>(e.from)] = 1;
          work.push_back(e.from);
        }
    }
  }
  for (std::size_t b = 0; b < n; ++b)
    if (fwd[b] && bwd[b])
      dag.nodes.push_back(static_cast<BlockId>(b));
  for (const auto &e : all)
    if (e.from != to && e.to != from && fwd[static_cast<std::size_t>(e.from)] &&
        bwd[static_cast<std::size_t>(e.from)] && fwd[static_cast<std::size_t>(e.to)] &&
        bwd[static_cast<std::size_t>(e.to)])
      dag.edges.push_back(e);
  std::sort(dag.edges.begin(), dag.edges.end());
  return dag;
}

std::uint64_t ProgramPathGraph::path_count() const {
  std::uint64_t total = 0;
  for (const auto &c : chains) {
    std::uint64_t n = 1;
    for (const auto &f : c.frames)
      n = sat_mul(n, f.dag.path_count());
    total = sat_add(total, n);
  }
  return total;
}

std::size_t ProgramPathGraph::max_levels() const {
  std::size_t m = 0;
  for (const auto &c : chains)
    m = std::max(m, c.frames.size());
  return m;
}

bool ProgramPathGraph::contains(const FunctionId &f, BlockId b) const {
  for (const auto &c : chains)
    for (const auto &fr : c.frames)
      if (fr.function == f && fr.dag.contains(b))
        return true;
  return false;
}

std::vector<ProgramPath> ProgramPathGraph::enumerate_paths(std::size_t cap) const {
  if (path_count() > cap)
    throw_analysis("program path graph has more than " + std::to_string(cap) +
                   " paths; use the DAG form or raise --cap");
  std::vector<ProgramPath> out;
  for (const auto &c : chains) {
    // Per-frame explicit path lists, then their product.
    std::vector<std::vector<ProgramPath>> per_frame;
    for (const auto &fr : c.frames) {
      std::vector<ProgramPath> paths;
      ProgramPath cur;
      auto dfs = [&](auto &&self, BlockId b) -> void {
        cur.push_back({fr.function, b, std::nullopt});
        if (b == fr.dag.to) {
          ProgramPath done = cur;
          done.back().call_site = fr.call_site;
          paths.push_back(std::move(done));
        } else {
          for (const auto &e : fr.dag.out_edges(b))
            self(self, e.to);
        }
        cur.pop_back();
      };
      dfs(dfs, fr.dag.from);
      per_frame.push_back(std::move(paths));
    }
    std::vector<ProgramPath> acc{ProgramPath{}};
    for (const auto &paths : per_frame) {
      std::vector<ProgramPath> next;
      for (const auto &prefix : acc)
        for (const auto &p : paths) {
          ProgramPath joined = prefix;
          joined.insert(joined.end(), p.begin(), p.end());
          next.push_back(std::move(joined));
        }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ProgramPathGraph build_program_path_graph(const IRProgram &p, const VulnerabilitySpec &v,
                                          Diagnostics *diags, std::size_t cap) {
  ProgramPathGraph g;
  g.vuln = v;
  auto loc = p.locate(v.statement);
  if (!loc || loc->first != v.function)
    throw_analysis("vulnerable statement " + std::to_string(v.statement) +
                   " is not in function '" + v.function + "'");
  g.vuln_block = loc->second;

  const CallGraph cg = build_call_graph(p);
  const auto chains = find_call_chains(cg, v.function, p.entry, diags, cap);

  std::map<FunctionId, ControlDepGraph> cdgs;
  auto cdg_of = [&](const IRFunction &f) -> const ControlDepGraph & {
    auto it = cdgs.find(f.id);
    if (it == cdgs.end())
      it = cdgs.emplace(f.id, compute_control_dependencies(f, diags)).first;
    return it->second;
  };

  for (const auto &chain : chains) {
    ChainPaths cp;
    cp.chain = chain;
    bool feasible = true;
    const int depth = static_cast<int>(chain.frames.size());
    for (int i = 0; i < depth; ++i) {
      const Frame &fr = chain.frames[static_cast<std::size_t>(i)];
      const IRFunction &f = p.function(fr.function);
      FramePaths fp;
      fp.function = fr.function;
      fp.call_site = fr.call_site;
      fp.level = depth - 1 - i;
      if (fr.call_site) {
        auto site = p.locate(*fr.call_site);
        fp.target = site->second;
      } else {
        fp.target = g.vuln_block;
      }
      fp.dag = intraprocedural_paths(f, f.entry_block, fp.target);
      if (fp.dag.empty()) {
        feasible = false;
        warn(diags, "infeasible-chain",
             fr.function + ": block " + f.block(fp.target).label +
                 " is unreachable from the function entry; call chain dropped");
        break;
      }
      fp.governing = cdg_of(f).transitive_governors(fp.target);
      for (BlockId b : fp.dag.nodes)
        g.conditional[{f.id, b}] = f.block(b).is_conditional();
      cp.frames.push_back(std::move(fp));
    }
    if (feasible)
      g.chains.push_back(std::move(cp));
  }
  if (g.chains.empty() && !chains.empty() && diags)
    diags->push_back({Diagnostic::Severity::Error, "unreachable-vulnerability",
                      "no feasible path reaches statement " + std::to_string(v.statement)});
  return g;
}

std::string to_string(const ProgramPath &path, const IRProgram &p) {
  std::string out;
  std::string cur_fn;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto &s = path[i];
    const std::string label = p.function(s.function).block(s.block).label;
    if (i == 0 || s.function != cur_fn || (i > 0 && path[i - 1].call_site)) {
      if (i)
        out += " => ";
      out += s.function + ":";
      cur_fn = s.function;
    } else {
      out += "-";
    }
    out += label;
  }
  return out;
}

bool reaches_vulnerability(const IRProgram &p, const VulnerabilitySpec &v,
                           const std::set<std::pair<FunctionId, BlockId>> &removed) {
  auto loc = p.locate(v.statement);
  if (!loc)
    return false;
  const CallGraph cg = build_call_graph(p);
  std::map<StatementId, std::vector<FunctionId>> callees;
  for (const auto &e : cg.edges)
    callees[e.call_site].push_back(e.callee);

  using Node = std::pair<FunctionId, BlockId>;
  std::set<Node> seen;
  std::vector<Node> work;
  auto push = [&](const FunctionId &f, BlockId b) {
    Node n{f, b};
    if (removed.count(n) || !seen.insert(n).second)
      return;
    work.push_back(std::move(n));
  };
  auto enter = [&](const FunctionId &f) {
    const IRFunction &fn = p.function(f);
    if (!fn.is_external)
      push(f, fn.entry_block);
  };
  enter(p.entry);
  while (!work.empty()) {
    auto [f, b] = work.back();
    work.pop_back();
    if (f == loc->first && b == loc->second)
      return true;
    const BasicBlock &blk = p.function(f).block(b);
    auto calls_of = [&](const Statement &s) {
      if (auto it = callees.find(s.id); it != callees.end())
        for (const auto &c : it->second)
          enter(c);
    };
    for (const auto &s : blk.statements)
      calls_of(s);
    if (blk.term.stmt)
      calls_of(*blk.term.stmt);
    for (BlockId t : blk.successors())
      push(f, t);
  }
  return false;
}

} // namespace paver
