#include "oracles.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace paver::testing {

namespace fs = std::filesystem;

std::string corpus_dir() { return PAVER_CORPUS_DIR; }

std::string corpus_path(const std::string &rel) { return corpus_dir() + "/" + rel; }

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

IRProgram compile_text(const std::string &text, const std::string &file) {
  return compile(SourceUnit{file, text});
}

std::vector<CorpusEntry> minilang_corpus() {
  std::vector<CorpusEntry> out;
  for (const auto &dir : fs::directory_iterator(corpus_dir())) {
    if (!dir.is_directory())
      continue;
    const std::string name = dir.path().filename().string();
    const fs::path mini = dir.path() / (name + ".mini");
    if (!fs::exists(mini))
      continue;
    out.push_back({name, mini.string(), (dir.path() / "vuln.json").string(),
                   (dir.path() / "suite.txt").string()});
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry &a, const CorpusEntry &b) { return a.name < b.name; });
  return out;
}

namespace {

int below(std::mt19937_64 &rng, int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

} // namespace

IRFunction random_cfg(std::mt19937_64 &rng, int n) {
  IRFunction f;
  f.id = "f";
  f.return_type = TypeKind::Unit;
  StatementId next = 1;
  for (int i = 0; i < n; ++i) {
    BasicBlock b;
    b.id = i;
    b.label = "b" + std::to_string(i);
    const int pick = below(rng, 10);
    if (n >= 2 && pick < 5) {
      b.term.kind = TermKind::Branch;
      b.term.then_target = below(rng, n);
      do
        b.term.else_target = below(rng, n);
      while (b.term.else_target == b.term.then_target);
      Statement cond;
      cond.id = next++;
      cond.kind = StmtKind::Condition;
      cond.op = StmtOp::Cond;
      b.term.stmt = cond;
    } else if (pick < 8) {
      b.term.kind = TermKind::Jump;
      b.term.then_target = below(rng, n);
    } else {
      b.term.kind = TermKind::Return;
    }
    f.blocks.push_back(std::move(b));
  }
  mark_dead_blocks(f);
  return f;
}

std::set<std::tuple<BlockId, BlockId, int>> brute_control_deps(const IRFunction &f) {
  const int n = static_cast<int>(f.blocks.size());
  const int exit = n;
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n + 1));
  for (const auto &b : f.blocks) {
    for (BlockId t : b.successors())
      succ[static_cast<std::size_t>(b.id)].push_back(t);
    if (b.term.kind == TermKind::Return || b.term.kind == TermKind::Halt)
      succ[static_cast<std::size_t>(b.id)].push_back(exit);
  }
  // Reaches `target` from `from` without entering `avoid`.
  auto reaches = [&](int from, int target, int avoid) {
    if (from == avoid)
      return false;
    std::vector<char> seen(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == target)
        return true;
      for (int w : succ[static_cast<std::size_t>(v)])
        if (w != avoid && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    return false;
  };
  std::vector<int> stuck;
  for (int v = 0; v < n; ++v)
    if (!reaches(v, exit, -1))
      stuck.push_back(v);
  for (int v : stuck)
    succ[static_cast<std::size_t>(v)].push_back(exit);

  auto pdom = [&](int y, int x) { return x == y || !reaches(x, exit, y); };

  std::set<std::tuple<BlockId, BlockId, int>> out;
  for (const auto &x : f.blocks) {
    if (!x.is_conditional())
      continue;
    const auto s = x.successors();
    for (int k = 0; k < 2; ++k)
      for (int y = 0; y < n; ++y)
        if (pdom(y, s[static_cast<std::size_t>(k)]) && !(y != x.id && pdom(y, x.id)))
          out.insert({y, x.id, k});
  }
  return out;
}

std::set<std::tuple<BlockId, BlockId, int>> as_set(const ControlDepGraph &g) {
  std::set<std::tuple<BlockId, BlockId, int>> out;
  for (const auto &d : g.deps)
    out.insert({d.governed, d.governor, d.branch});
  return out;
}

namespace {

struct SourceGen {
  std::mt19937_64 &rng;
  int functions;
  std::ostringstream out;

  std::string callee() { return "f" + std::to_string(below(rng, functions)); }

  void indent(int depth) { out << std::string(static_cast<std::size_t>(2 * depth + 2), ' '); }

  void body(int depth, int &controls) {
    const int count = 1 + below(rng, 3);
    for (int i = 0; i < count; ++i) {
      const int pick = below(rng, 10);
      indent(depth);
      if (pick < 2) {
        out << "x = x + " << below(rng, 5) << ";\n";
      } else if (pick < 4 && functions > 0) {
        out << "x = " << callee() << "(x);\n";
      } else if (pick == 4) {
        out << "print(x);\n";
      } else if (pick < 8 && controls > 0 && depth < 2) {
        --controls;
        const bool call_cond = below(rng, 3) == 0 && functions > 0;
        out << "if (" << (call_cond ? callee() + "(x)" : std::string("x")) << " > "
            << below(rng, 5) << ") {\n";
        body(depth + 1, controls);
        if (below(rng, 4) == 0) {
          indent(depth + 1);
          out << "return x;\n";
        }
        indent(depth);
        if (below(rng, 2)) {
          out << "} else {\n";
          body(depth + 1, controls);
          indent(depth);
        }
        out << "}\n";
      } else if (pick < 10 && controls > 0 && depth < 2) {
        --controls;
        out << "while (x < " << below(rng, 6) << ") {\n";
        body(depth + 1, controls);
        indent(depth + 1);
        out << "x = x + 1;\n";
        indent(depth);
        out << "}\n";
      } else {
        out << "x = x * 2;\n";
      }
    }
  }
};

std::vector<StatementId> statements_of(const IRFunction &f) {
  std::vector<StatementId> ids;
  for (const auto &b : f.blocks) {
    for (const auto &s : b.statements)
      ids.push_back(s.id);
    if (b.term.stmt)
      ids.push_back(b.term.stmt->id);
  }
  return ids;
}

} // namespace

RandomProgram random_program(std::mt19937_64 &rng, int max_functions, int max_blocks) {
  for (;;) {
    const int helpers = below(rng, max_functions); // plus main
    SourceGen g{rng, helpers, {}};
    for (int k = 0; k < helpers; ++k) {
      g.out << "fn f" << k << "(x: int) -> int {\n";
      int controls = 2;
      g.body(0, controls);
      g.out << "  return x;\n}\n\n";
    }
    g.out << "fn main() -> int {\n  let x: int = read();\n";
    int controls = 2;
    g.body(0, controls);
    g.out << "  return 0;\n}\n";

    RandomProgram r;
    r.source = g.out.str();
    r.program = compile_text(r.source, "random.mini");
    bool small = true;
    for (const auto &[name, f] : r.program.functions)
      small = small && static_cast<int>(f.blocks.size()) <= max_blocks;
    if (!small)
      continue;

    std::vector<FunctionId> names;
    for (const auto &[name, f] : r.program.functions)
      names.push_back(name);
    const IRFunction &vf = r.program.function(names[static_cast<std::size_t>(below(rng, static_cast<int>(names.size())))]);
    const auto ids = statements_of(vf);
    VulnerabilityRequest req;
    req.function = vf.id;
    req.statement = ids[static_cast<std::size_t>(below(rng, static_cast<int>(ids.size())))];
    r.vuln = resolve_vulnerability(r.program, req);
    return r;
  }
}

std::vector<std::vector<int>> simple_paths(const std::vector<std::vector<int>> &succ, int from,
                                           int to) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<char> on(succ.size(), 0);
  auto dfs = [&](auto &&self, int v) -> void {
    cur.push_back(v);
    on[static_cast<std::size_t>(v)] = 1;
    if (v == to) {
      out.push_back(cur);
    } else {
      for (int w : succ[static_cast<std::size_t>(v)])
        if (!on[static_cast<std::size_t>(w)])
          self(self, w);
    }
    on[static_cast<std::size_t>(v)] = 0;
    cur.pop_back();
  };
  dfs(dfs, from);
  return out;
}

std::vector<ProgramPath> brute_program_paths(const IRProgram &p, const VulnerabilitySpec &v) {
  // Direct call sites only; the random programs never call through references.
  std::map<FunctionId, std::set<std::pair<StatementId, FunctionId>>> sites;
  std::map<StatementId, BlockId> site_block;
  for (const auto &[name, f] : p.functions)
    for (const auto &b : f.blocks) {
      std::vector<const Statement *> stmts;
      for (const auto &s : b.statements)
        stmts.push_back(&s);
      if (b.term.stmt)
        stmts.push_back(&*b.term.stmt);
      for (const Statement *s : stmts)
        for (const auto &c : s->calls) {
          sites[name].insert({s->id, c.callee});
          site_block[s->id] = b.id;
        }
    }
  const BlockId vuln_block = p.locate(v.statement)->second;

  auto frame_paths = [&](const FunctionId &fn, BlockId target) {
    const IRFunction &f = p.function(fn);
    std::vector<std::vector<int>> succ(f.blocks.size());
    for (const auto &b : f.blocks)
      for (BlockId t : b.successors())
        succ[static_cast<std::size_t>(b.id)].push_back(t);
    return simple_paths(succ, f.entry_block, target);
  };

  std::vector<ProgramPath> out;
  std::vector<std::pair<FunctionId, std::optional<StatementId>>> chain;
  auto emit = [&] {
    std::vector<ProgramPath> acc{ProgramPath{}};
    for (const auto &[fn, site] : chain) {
      const BlockId target = site ? site_block.at(*site) : vuln_block;
      std::vector<ProgramPath> next;
      for (const auto &prefix : acc)
        for (const auto &path : frame_paths(fn, target)) {
          ProgramPath joined = prefix;
          for (int b : path)
            joined.push_back({fn, b, std::nullopt});
          joined.back().call_site = site;
          next.push_back(std::move(joined));
        }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  };
  auto walk = [&](auto &&self, const FunctionId &fn) -> void {
    if (fn == v.function) {
      chain.push_back({fn, std::nullopt});
      emit();
      chain.pop_back();
      return;
    }
    for (const auto &[site, callee] : sites[fn]) {
      if (!p.find(callee) || p.function(callee).is_external)
        continue;
      bool seen = callee == fn;
      for (const auto &fr : chain)
        seen = seen || fr.first == callee;
      if (seen)
        continue;
      chain.push_back({fn, site});
      self(self, callee);
      chain.pop_back();
    }
  };
  walk(walk, p.entry);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PatchEvaluation> random_evaluations(std::mt19937_64 &rng) {
  const int n = below(rng, 12);
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ids[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(ids.begin(), ids.end(), rng);
  static const char *const fns[] = {"alpha", "beta", "gamma"};
  std::vector<PatchEvaluation> out;
  for (int i = 0; i < n; ++i) {
    PatchEvaluation e;
    e.patch.id = ids[static_cast<std::size_t>(i)];
    e.patch.location.function = fns[below(rng, 3)];
    e.patch.location.block = below(rng, 4);
    e.patch.location.level = below(rng, 3);
    e.total = below(rng, 3) == 0 ? 2 * below(rng, 3) : below(rng, 9);
    e.passed = e.total ? below(rng, e.total + 1) : 0;
    e.pfr = {e.passed, e.total};
    e.exploit_checked = true;
    e.exploit_blocked = below(rng, 2) == 1;
    out.push_back(std::move(e));
  }
  return out;
}

std::string check_ranking(const std::vector<PatchEvaluation> &input,
                          const std::vector<PatchEvaluation> &ranked) {
  if (input.size() != ranked.size())
    return "size changed";
  std::multiset<int> a, b;
  for (const auto &e : input)
    a.insert(e.patch.id);
  for (const auto &e : ranked)
    b.insert(e.patch.id);
  if (a != b)
    return "patch set changed";
  // passed/total compared by cross-multiplication; an empty suite counts as 0.
  auto less_pfr = [](const PatchEvaluation &x, const PatchEvaluation &y) {
    const long xn = x.total ? x.passed : 0, xd = x.total ? x.total : 1;
    const long yn = y.total ? y.passed : 0, yd = y.total ? y.total : 1;
    return xn * yd < yn * xd;
  };
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].rank != static_cast<int>(i + 1))
      return "rank " + std::to_string(ranked[i].rank) + " at position " + std::to_string(i);
    if (i == 0)
      continue;
    const auto &x = ranked[i - 1];
    const auto &y = ranked[i];
    if (less_pfr(x, y))
      return "pfr not descending at " + std::to_string(i);
    if (less_pfr(y, x))
      continue;
    if (x.exploit_blocked != y.exploit_blocked) {
      if (!x.exploit_blocked)
        return "unblocked patch ahead of blocked at " + std::to_string(i);
      continue;
    }
    const auto kx = std::tie(x.patch.location.level, x.patch.location.block,
                             x.patch.location.function, x.patch.id);
    const auto ky = std::tie(y.patch.location.level, y.patch.location.block,
                             y.patch.location.function, y.patch.id);
    if (!(kx < ky))
      return "tie-break order violated at " + std::to_string(i);
  }
  return "";
}

} // namespace paver::testing
