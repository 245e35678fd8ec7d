#include "paver/graph_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace paver {

using nlohmann::json;

namespace {

std::string id_text(const json &v, const std::string &where) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number_integer())
    return std::to_string(v.get<std::int64_t>());
  throw_input(where + ": block id must be a string or an integer");
}

TypeKind parse_type(const std::string &s, const std::string &where) {
  if (s == "int") return TypeKind::Int;
  if (s == "bool") return TypeKind::Bool;
  if (s == "ref") return TypeKind::Ref;
  if (s == "unit") return TypeKind::Unit;
  throw_input(where + ": unknown return type '" + s + "'");
}

const std::string &label(const IRProgram &p, const FunctionId &f, BlockId b) {
  return p.function(f).block(b).label;
}

json diagnostics_json(const Diagnostics &diags) {
  json out = json::array();
  for (const auto &d : diags)
    out.push_back({{"severity", d.severity == Diagnostic::Severity::Error ? "error" : "warning"},
                   {"code", d.code},
                   {"message", d.message}});
  return out;
}

json vuln_json(const IRProgram &p, const VulnerabilitySpec &v) {
  json out = {{"function", v.function}, {"statement", v.statement}};
  if (auto it = p.source_map.find(v.statement); it != p.source_map.end() && it->second.line)
    out["line"] = it->second.line;
  if (auto loc = p.locate(v.statement))
    out["block"] = label(p, loc->first, loc->second);
  return out;
}

} // namespace

GraphImport import_graph(const std::string &json_text, const std::string &path) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw_input(path + ": " + e.what());
  }

  GraphImport gi;
  IRProgram &p = gi.program;
  p.file = path;
  p.executable = false;
  try {
    if (!doc.is_object())
      throw_input(path + ": top level must be an object");
    const int version = doc.value("schema_version", kGraphSchemaVersion);
    if (version != kGraphSchemaVersion)
      throw_input(path + ": schema_version " + std::to_string(version) + " is not supported");
    if (!doc.contains("functions") || !doc["functions"].is_array())
      throw_input(path + ": 'functions' must be an array");

    std::map<StatementId, std::pair<FunctionId, BlockId>> owner;
    for (const auto &jf : doc["functions"]) {
      IRFunction f;
      f.id = jf.at("name").get<std::string>();
      const std::string where = path + ": functions[" + f.id + "]";
      if (p.functions.count(f.id))
        throw_input(where + ": duplicate function name");
      f.return_type = parse_type(jf.value("return_type", std::string("unit")), where);
      f.is_external = jf.value("external", false);
      if (f.is_external) {
        p.functions.emplace(f.id, std::move(f));
        continue;
      }
      const auto &jblocks = jf.at("blocks");
      if (!jblocks.is_array() || jblocks.empty())
        throw_input(where + ".blocks: a defined function needs at least one block");

      std::map<std::string, BlockId> ids;
      std::map<BlockId, bool> conditional;
      for (const auto &jb : jblocks) {
        BasicBlock b;
        b.id = static_cast<BlockId>(f.blocks.size());
        b.label = id_text(jb.at("id"), where + ".blocks");
        if (!ids.emplace(b.label, b.id).second)
          throw_input(where + ".blocks: duplicate block id '" + b.label + "'");
        conditional[b.id] = jb.value("conditional", false);
        for (const auto &js : jb.value("statements", json::array())) {
          Statement s;
          s.id = js.get<StatementId>();
          if (!owner.emplace(s.id, std::make_pair(f.id, b.id)).second)
            throw_input(where + ".blocks[" + b.label + "]: duplicate statement id " +
                        std::to_string(s.id));
          p.source_map[s.id] = SourceLoc{path, 0, false};
          b.statements.push_back(std::move(s));
        }
        f.blocks.push_back(std::move(b));
      }

      std::map<BlockId, std::map<int, BlockId>> out_edges;
      for (const auto &je : jf.value("edges", json::array())) {
        const std::string from = id_text(je.at("from"), where + ".edges");
        const std::string to = id_text(je.at("to"), where + ".edges");
        const int branch = je.value("branch", 0);
        auto fi = ids.find(from), ti = ids.find(to);
        if (fi == ids.end())
          throw_input(where + ".edges: unknown block '" + from + "'");
        if (ti == ids.end())
          throw_input(where + ".edges: edge " + from + "->" + to + " targets unknown block '" +
                      to + "'");
        if (branch != 0 && branch != 1)
          throw_input(where + ".edges: branch index must be 0 or 1");
        if (!out_edges[fi->second].emplace(branch, ti->second).second)
          throw_input(where + ".edges: block '" + from + "' has two edges with branch " +
                      std::to_string(branch));
      }
      for (auto &b : f.blocks) {
        const auto &oe = out_edges[b.id];
        if (conditional[b.id]) {
          if (oe.size() != 2 || oe.at(0) == oe.at(1))
            throw_input(where + ".blocks[" + b.label +
                        "]: a conditional block needs two distinct edges, branches 0 and 1");
          b.term.kind = TermKind::Branch;
          b.term.then_target = oe.at(0);
          b.term.else_target = oe.at(1);
        } else if (oe.size() == 1) {
          if (!oe.count(0))
            throw_input(where + ".blocks[" + b.label +
                        "]: the single edge of a non-conditional block has branch 0");
          b.term.kind = TermKind::Jump;
          b.term.then_target = oe.at(0);
        } else if (oe.empty()) {
          b.term.kind = TermKind::Return;
        } else {
          throw_input(where + ".blocks[" + b.label +
                      "]: a non-conditional block has at most one edge");
        }
      }
      if (jf.contains("entry")) {
        auto it = ids.find(id_text(jf["entry"], where + ".entry"));
        if (it == ids.end())
          throw_input(where + ".entry: unknown block");
        f.entry_block = it->second;
      }
      if (f.entry_block != 0)
        throw_input(where + ".entry: the entry block must be listed first");
      mark_dead_blocks(f);
      verify_function(f);
      p.functions.emplace(f.id, std::move(f));
    }

    p.entry = doc.value("entry", std::string("main"));
    if (!p.functions.count(p.entry))
      throw_input(path + ".entry: function '" + p.entry + "' is not defined");

    for (const auto &jc : doc.value("calls", json::array())) {
      FunctionId caller, callee;
      StatementId site = 0;
      if (jc.is_array()) {
        caller = jc.at(0).get<std::string>();
        site = jc.at(1).get<StatementId>();
        callee = jc.at(2).get<std::string>();
      } else {
        caller = jc.at("caller").get<std::string>();
        site = jc.at("site").get<StatementId>();
        callee = jc.at("callee").get<std::string>();
      }
      auto it = owner.find(site);
      if (it == owner.end() || it->second.first != caller)
        throw_input(path + ".calls: statement " + std::to_string(site) + " is not in '" +
                    caller + "'");
      if (!p.functions.count(callee))
        throw_input(path + ".calls: callee '" + callee + "' is not declared");
      auto &blk = p.functions.at(caller).blocks[static_cast<std::size_t>(it->second.second)];
      for (auto &s : blk.statements)
        if (s.id == site) {
          s.kind = StmtKind::Call;
          s.calls.push_back({callee, false, {}});
        }
    }

    if (doc.contains("vulnerable") && !doc["vulnerable"].is_null()) {
      const auto &jv = doc["vulnerable"];
      VulnerabilityRequest req;
      req.function = jv.at("function").get<std::string>();
      if (jv.contains("statement"))
        req.statement = jv["statement"].get<StatementId>();
      auto fit = p.functions.find(req.function);
      if (fit == p.functions.end() || fit->second.is_external)
        throw_input(path + ".vulnerable.function: '" + req.function +
                    "' is not a defined function");
      if (req.statement) {
        auto it = owner.find(*req.statement);
        if (it == owner.end() || it->second.first != req.function)
          throw_input(path + ".vulnerable.statement: " + std::to_string(*req.statement) +
                      " is not a statement of '" + req.function + "'");
      }
      gi.vulnerable = std::move(req);
    }
  } catch (const json::exception &e) {
    throw_input(path + ": " + e.what());
  }
  verify_program(p);
  return gi;
}

GraphImport load_graph(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw_input("cannot read graph document '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return import_graph(ss.str(), path);
}

std::string export_graph(const IRProgram &p, const std::optional<VulnerabilitySpec> &v) {
  json doc;
  doc["schema_version"] = kGraphSchemaVersion;
  doc["entry"] = p.entry;
  doc["functions"] = json::array();
  for (const auto &[name, f] : p.functions) {
    json jf = {{"name", name},
               {"return_type", to_string(f.return_type)},
               {"external", f.is_external}};
    if (!f.is_external) {
      jf["entry"] = f.block(f.entry_block).label;
      json blocks = json::array(), edges = json::array();
      for (const auto &b : f.blocks) {
        json stmts = json::array();
        for (const auto &s : b.statements)
          stmts.push_back(s.id);
        if (b.term.stmt)
          stmts.push_back(b.term.stmt->id);
        blocks.push_back({{"id", b.label}, {"conditional", b.is_conditional()},
                          {"statements", stmts}});
        auto succ = b.successors();
        for (std::size_t k = 0; k < succ.size(); ++k)
          edges.push_back({{"from", b.label}, {"to", f.block(succ[k]).label},
                           {"branch", static_cast<int>(k)}});
      }
      jf["blocks"] = blocks;
      jf["edges"] = edges;
    }
    doc["functions"].push_back(jf);
  }
  json calls = json::array();
  for (const auto &e : build_call_graph(p).edges)
    calls.push_back({e.caller, e.call_site, e.callee});
  doc["calls"] = calls;
  if (v)
    doc["vulnerable"] = {{"function", v->function}, {"statement", v->statement}};
  return doc.dump(2) + "\n";
}

std::string path_graph_json(const IRProgram &p, const ProgramPathGraph &ppg,
                            const Diagnostics &diags, std::size_t cap) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["vulnerable"] = vuln_json(p, ppg.vuln);
  doc["levels"] = ppg.max_levels();
  doc["path_count"] = ppg.path_count();
  json chains = json::array();
  for (const auto &c : ppg.chains) {
    json frames = json::array();
    for (const auto &fr : c.frames) {
      const IRFunction &f = p.function(fr.function);
      json blocks = json::array(), edges = json::array(), gov = json::array();
      for (BlockId b : fr.dag.nodes) {
        json jb = {{"id", f.block(b).label}, {"conditional", f.block(b).is_conditional()}};
        if (f.block(b).line)
          jb["line"] = f.block(b).line;
        blocks.push_back(jb);
      }
      for (const auto &e : fr.dag.edges)
        edges.push_back({f.block(e.from).label, f.block(e.to).label, e.branch});
      for (const auto &[g, k] : fr.governing)
        gov.push_back({f.block(g).label, k});
      json jf = {{"function", fr.function}, {"level", fr.level},
                 {"target", f.block(fr.target).label}, {"blocks", blocks},
                 {"edges", edges}, {"governing", gov}};
      if (fr.call_site)
        jf["call_site"] = *fr.call_site;
      frames.push_back(jf);
    }
    chains.push_back({{"frames", frames}});
  }
  doc["chains"] = chains;
  if (ppg.path_count() <= cap) {
    json paths = json::array();
    for (const auto &path : ppg.enumerate_paths(cap))
      paths.push_back(to_string(path, p));
    doc["paths"] = paths;
  }
  doc["diagnostics"] = diagnostics_json(diags);
  return doc.dump(2) + "\n";
}

std::string candidates_json(const IRProgram &p, const ProgramPathGraph &ppg,
                            const std::vector<CandidatePatchLocation> &locs,
                            const Diagnostics &diags) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["vulnerable"] = vuln_json(p, ppg.vuln);
  json rows = json::array();
  for (const auto &l : locs) {
    const auto &b = p.function(l.function).block(l.block);
    json r = {{"function", l.function},
              {"block", b.label},
              {"level", l.level},
              {"governing_function", l.governing_function},
              {"governing_conditional", label(p, l.governing_function, l.governing_conditional)},
              {"branch", l.branch}};
    if (b.line)
      r["line"] = b.line;
    rows.push_back(r);
  }
  doc["candidates"] = rows;
  doc["diagnostics"] = diagnostics_json(diags);
  return doc.dump(2) + "\n";
}

Report export_report(const IRProgram &p, const std::vector<PatchEvaluation> &evals,
                     const ReportMeta &meta) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["program"] = meta.program;
  doc["vulnerable"] = vuln_json(p, meta.vulnerable);

  const PatchEvaluation *best = evals.empty() ? nullptr : &evals.front();
  json summary = {{"patches", evals.size()},
                  {"levels", evals.empty() ? 0 : meta.levels},
                  {"best_patch_level", best ? best->patch.location.level : 0},
                  {"best_passed", best ? best->passed : 0},
                  {"total", best ? best->total : 0},
                  {"best_pfr", best ? pfr_display(best->passed, best->total) : "0"}};
  doc["summary"] = summary;

  json rows = json::array();
  for (const auto &ev : evals) {
    const auto &loc = ev.patch.location;
    const auto &b = p.function(loc.function).block(loc.block);
    json r = {{"rank", ev.rank},
              {"patch_id", ev.patch.id},
              {"function", loc.function},
              {"block", b.label},
              {"level", loc.level},
              {"patch", patch_source(ev.patch)},
              {"provenance", to_string(ev.patch.errval.provenance)},
              {"passed", ev.passed},
              {"total", ev.total},
              {"pfr", std::to_string(ev.pfr.num) + "/" + std::to_string(ev.pfr.den)},
              {"pfr_percent", pfr_percent(ev.passed, ev.total)},
              {"display", pfr_display(ev.passed, ev.total)},
              {"exploit_checked", ev.exploit_checked},
              {"exploit_blocked", ev.exploit_blocked},
              {"on_exploit_path", ev.on_exploit_path}};
    if (b.line)
      r["line"] = b.line;
    if (ev.error)
      r["error"] = *ev.error;
    rows.push_back(r);
  }
  doc["rows"] = rows;
  if (meta.mitigation)
    doc["mitigation"] = {{"static_cut", meta.mitigation->static_cut},
                         {"seed", meta.mitigation->seed},
                         {"fuzz_runs", meta.mitigation->fuzz_runs},
                         {"fuzz_faults", meta.mitigation->fuzz_faults}};
  doc["diagnostics"] = diagnostics_json(meta.diagnostics);

  std::ostringstream t;
  t << "program: " << meta.program << "\n";
  t << "vulnerable: " << meta.vulnerable.function << " statement " << meta.vulnerable.statement;
  if (auto it = p.source_map.find(meta.vulnerable.statement);
      it != p.source_map.end() && it->second.line)
    t << " (line " << it->second.line << ")";
  t << "\n";
  t << "# patches: " << evals.size() << "  # levels: " << summary["levels"].get<int>()
    << "  best patch level: " << summary["best_patch_level"].get<int>()
    << "  best: " << summary["best_pfr"].get<std::string>() << "\n\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-5s %-5s %-20s %-8s %-5s %-5s %-14s %-12s %s\n", "rank",
                "id", "function", "block", "line", "level", "passed", "exploit", "patch");
  t << buf;
  for (const auto &ev : evals) {
    const auto &loc = ev.patch.location;
    const auto &b = p.function(loc.function).block(loc.block);
    const std::string exploit = !ev.exploit_checked ? "n/a"
                                : ev.exploit_blocked ? "blocked"
                                                     : "NOT blocked";
    std::snprintf(buf, sizeof buf, "%-5d %-5d %-20s %-8s %-5s %-5d %-14s %-12s %s\n", ev.rank,
                  ev.patch.id, loc.function.c_str(), b.label.c_str(),
                  b.line ? std::to_string(b.line).c_str() : "-", loc.level,
                  pfr_display(ev.passed, ev.total).c_str(), exploit.c_str(),
                  ev.error ? ("error: " + *ev.error).c_str() : patch_source(ev.patch).c_str());
    t << buf;
  }
  if (meta.mitigation)
    t << "\nall candidates: static cut " << (meta.mitigation->static_cut ? "holds" : "FAILS")
      << ", " << meta.mitigation->fuzz_faults << "/" << meta.mitigation->fuzz_runs
      << " fuzz runs fault at the vulnerability (seed " << meta.mitigation->seed << ")\n";
  for (const auto &d : meta.diagnostics)
    t << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << ": " << d.code
      << ": " << d.message << "\n";
  return {doc.dump(2) + "\n", t.str()};
}

} // namespace paver
