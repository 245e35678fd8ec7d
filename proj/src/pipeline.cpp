#include "paver/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "paver/frontend.hpp"

namespace paver {

namespace fs = std::filesystem;

std::optional<InputMode> parse_input_mode(const std::string &text) {
  if (text == "auto") return InputMode::Auto;
  if (text == "minilang") return InputMode::MiniLang;
  if (text == "graph") return InputMode::Graph;
  return std::nullopt;
}

namespace {

InputMode effective_mode(const RunConfig &cfg) {
  if (cfg.mode != InputMode::Auto)
    return cfg.mode;
  return fs::path(cfg.program).extension() == ".json" ? InputMode::Graph : InputMode::MiniLang;
}

void require_file(const std::string &path, const std::string &flag) {
  if (path.empty())
    throw Error(ErrorKind::Usage, flag + " is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorKind::Usage, flag + ": no such file '" + path + "'");
}

void fail_on_errors(const Diagnostics &diags) {
  for (const auto &d : diags)
    if (d.severity == Diagnostic::Severity::Error)
      throw_analysis(d.code + ": " + d.message);
}

struct Located {
  LoadedTarget target;
  ProgramPathGraph ppg;
  std::vector<CandidatePatchLocation> candidates;
  Diagnostics diags;
};

Located run_analysis(const RunConfig &cfg, bool locate) {
  Located r;
  r.target = load_target(cfg);
  r.ppg = build_program_path_graph(r.target.program, r.target.vuln, &r.diags, cfg.cap);
  fail_on_errors(r.diags);
  if (locate)
    r.candidates = candidate_locations(r.ppg, r.target.program, &r.diags);
  return r;
}

void write_file(const RunConfig &cfg, const std::string &name, const std::string &text,
                PhaseOutput &out) {
  if (cfg.out.empty())
    return;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  const fs::path path = fs::path(cfg.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text))
    throw_input("cannot write '" + path.string() + "'");
  out.written.push_back(path.string());
}

std::string analyze_text(const IRProgram &p, const ProgramPathGraph &ppg, std::size_t cap) {
  std::ostringstream t;
  t << "chains: " << ppg.chains.size() << "  paths: " << ppg.path_count()
    << "  levels: " << ppg.max_levels() << "\n";
  for (const auto &c : ppg.chains) {
    t << "chain:";
    for (const auto &fr : c.frames)
      t << " " << fr.function;
    t << "\n";
  }
  if (ppg.path_count() <= cap)
    for (const auto &path : ppg.enumerate_paths(cap))
      t << "  " << to_string(path, p) << "\n";
  return t.str();
}

std::string locate_text(const IRProgram &p, const std::vector<CandidatePatchLocation> &locs) {
  std::ostringstream t;
  t << "candidates: " << locs.size() << "\n";
  for (const auto &l : locs) {
    const auto &b = p.function(l.function).block(l.block);
    t << "  level " << l.level << "  " << l.function << ":" << b.label;
    if (b.line)
      t << " (line " << b.line << ")";
    t << "  after " << p.function(l.governing_function).block(l.governing_conditional).label
      << " branch " << l.branch << "\n";
  }
  return t.str();
}

std::string diag_text(const Diagnostics &diags) {
  std::string out;
  for (const auto &d : diags)
    out += std::string(d.severity == Diagnostic::Severity::Error ? "error" : "warning") + ": " +
           d.code + ": " + d.message + "\n";
  return out;
}

} // namespace

void validate(const RunConfig &cfg, bool needs_suite) {
  require_file(cfg.program, "--program");
  if (effective_mode(cfg) == InputMode::MiniLang || !cfg.vuln.empty())
    require_file(cfg.vuln, "--vuln");
  if (needs_suite)
    require_file(cfg.suite, "--suite");
  if (cfg.cap < 1)
    throw Error(ErrorKind::Usage, "--cap must be at least 1");
  if (cfg.limits.max_steps < 1)
    throw Error(ErrorKind::Usage, "--max-steps must be at least 1");
  if (cfg.jobs < 1)
    throw Error(ErrorKind::Usage, "--jobs must be at least 1");
}

LoadedTarget load_target(const RunConfig &cfg) {
  LoadedTarget t;
  std::optional<VulnerabilityRequest> req;
  if (effective_mode(cfg) == InputMode::Graph) {
    GraphImport gi = load_graph(cfg.program);
    t.program = std::move(gi.program);
    req = std::move(gi.vulnerable);
  } else {
    t.program = compile(load_source(cfg.program));
  }
  if (!cfg.vuln.empty()) {
    VulnerabilityRequest file_req = load_vulnerability_request(cfg.vuln);
    if (req && !file_req.exploit)
      file_req.exploit = req->exploit;
    req = std::move(file_req);
  }
  if (!req)
    throw Error(ErrorKind::Usage, "no vulnerability given: pass --vuln");
  t.vuln = resolve_vulnerability(t.program, *req);
  return t;
}

PhaseOutput cmd_analyze(const RunConfig &cfg) {
  validate(cfg, false);
  Located r = run_analysis(cfg, false);
  PhaseOutput out;
  out.diagnostics = r.diags;
  out.json = path_graph_json(r.target.program, r.ppg, r.diags, cfg.cap);
  out.text = analyze_text(r.target.program, r.ppg, cfg.cap) + diag_text(r.diags);
  write_file(cfg, "path_graph.json", out.json, out);
  return out;
}

PhaseOutput cmd_locate(const RunConfig &cfg) {
  validate(cfg, false);
  Located r = run_analysis(cfg, true);
  PhaseOutput out;
  out.diagnostics = r.diags;
  out.json = candidates_json(r.target.program, r.ppg, r.candidates, r.diags);
  out.text = locate_text(r.target.program, r.candidates) + diag_text(r.diags);
  write_file(cfg, "candidates.json", out.json, out);
  return out;
}

PhaseOutput cmd_evaluate(const RunConfig &cfg) {
  if (effective_mode(cfg) == InputMode::Graph)
    throw Error(ErrorKind::Usage,
                "evaluate runs the patched program, which needs a MiniLang source; graph "
                "documents support analyze and locate only");
  validate(cfg, true);
  Located r = run_analysis(cfg, true);
  const IRProgram &p = r.target.program;

  TestSuite suite = load_suite(cfg.suite);
  if (r.target.vuln.exploit)
    suite.exploit = Exploit{r.target.vuln.exploit->input, r.target.vuln.exploit->kind,
                            r.target.vuln.statement};

  const std::vector<Patch> patches = synthesize_patches(p, r.candidates);
  EvalOptions opts;
  opts.limits = cfg.limits;
  opts.jobs = cfg.jobs;
  const auto evals = rank(evaluate_patches(p, patches, suite, opts));

  ReportMeta meta;
  meta.program = fs::path(cfg.program).filename().string();
  meta.vulnerable = r.target.vuln;
  meta.levels = static_cast<int>(r.ppg.max_levels());
  meta.diagnostics = r.diags;
  if (!patches.empty()) {
    MitigationCheck m;
    std::set<std::pair<FunctionId, BlockId>> removed;
    for (const auto &l : r.candidates)
      removed.insert({l.function, l.block});
    m.static_cut = !reaches_vulnerability(p, r.target.vuln, removed);
    m.seed = cfg.seed;
    m.fuzz_runs = cfg.fuzz_runs;
    const IRProgram all = apply_patches(p, patches);
    for (const auto &in : fuzz_inputs(suite, cfg.seed, cfg.fuzz_runs))
      m.fuzz_faults += run_program(all, in, cfg.limits).faulted_at(r.target.vuln.statement);
    meta.mitigation = m;
  }

  const Report report = export_report(p, evals, meta);
  PhaseOutput out;
  out.diagnostics = r.diags;
  out.json = report.json;
  out.text = report.text;
  write_file(cfg, "report.json", report.json, out);
  write_file(cfg, "report.txt", report.text, out);
  return out;
}

PhaseOutput cmd_all(const RunConfig &cfg) {
  PhaseOutput a = cmd_analyze(cfg);
  PhaseOutput l = cmd_locate(cfg);
  if (effective_mode(cfg) == InputMode::Graph) {
    l.written.insert(l.written.begin(), a.written.begin(), a.written.end());
    l.text = a.text + "\n" + l.text + "\nevaluation skipped: graph documents cannot be executed\n";
    return l;
  }
  PhaseOutput out = cmd_evaluate(cfg);
  out.written.insert(out.written.begin(), l.written.begin(), l.written.end());
  out.written.insert(out.written.begin(), a.written.begin(), a.written.end());
  out.text = a.text + "\n" + l.text + "\n" + out.text;
  return out;
}

} // namespace paver
