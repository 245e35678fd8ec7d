#include <gtest/gtest.h>

#include <json.hpp>

#include "oracles.hpp"
#include "paver/graph_io.hpp"
#include "paver/patch_locator.hpp"

using namespace paver;
using namespace paver::testing;
using nlohmann::json;

namespace {

std::string fig1() { return read_file(corpus_path("fig1/program.graph.json")); }

// Replaces one field of the Fig. 1 document and expects the import to fail.
void expect_rejected(const std::function<void(json &)> &edit, const std::string &fragment) {
  json doc = json::parse(fig1());
  edit(doc);
  try {
    import_graph(doc.dump());
    ADD_FAILURE() << "accepted document with " << fragment;
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

} // namespace

TEST(GraphIo, ImportsFigureOne) {
  const GraphImport gi = import_graph(fig1());
  EXPECT_FALSE(gi.program.executable);
  const IRFunction &f = gi.program.function("main");
  EXPECT_EQ(f.blocks.size(), 9u);
  EXPECT_EQ(f.block(f.entry_block).label, "a");
  ASSERT_TRUE(gi.vulnerable);
  EXPECT_EQ(gi.vulnerable->statement, 8);
  for (const auto &b : f.blocks)
    EXPECT_EQ(b.is_conditional(), b.label == "a" || b.label == "b" || b.label == "c");
}

TEST(GraphIo, RejectsMalformedDocuments) {
  expect_rejected([](json &d) { d["schema_version"] = 7; }, "schema_version");
  expect_rejected([](json &d) { d["functions"] = 3; }, "functions");
  expect_rejected([](json &d) { d["entry"] = "nowhere"; }, "entry");
  expect_rejected([](json &d) { d["functions"][0]["edges"][0]["to"] = "zz"; }, "zz");
  expect_rejected([](json &d) { d["functions"][0]["edges"][0]["branch"] = 2; }, "branch");
  expect_rejected([](json &d) { d["functions"][0]["blocks"][1]["id"] = "a"; }, "duplicate block");
  expect_rejected([](json &d) { d["functions"][0]["blocks"][1]["conditional"] = true; }, "1");
  expect_rejected([](json &d) { d["functions"][0]["blocks"][2]["statements"] = {1}; },
                  "duplicate statement");
  expect_rejected([](json &d) { d["functions"][0]["entry"] = "b"; }, "listed first");
  expect_rejected([](json &d) { d["calls"] = {{"main", 99, "main"}}; }, "calls");
  expect_rejected([](json &d) { d["vulnerable"]["statement"] = 77; }, "vulnerable");
  EXPECT_THROW(import_graph("{ not json"), Error);
  EXPECT_THROW(load_graph("/nonexistent/graph.json"), Error);
}

TEST(GraphIo, IntegerBlockIdsBecomeLabels) {
  json doc = json::parse(fig1());
  doc["functions"][0]["blocks"][1]["id"] = 1;
  for (auto &e : doc["functions"][0]["edges"])
    for (const char *k : {"from", "to"})
      if (e[k] == "1")
        e[k] = 1;
  const GraphImport gi = import_graph(doc.dump());
  EXPECT_TRUE(gi.program.function("main").find_block("1"));
}

TEST(GraphIo, ExportImportIsIdempotent) {
  for (const auto &c : minilang_corpus()) {
    const IRProgram p = compile(load_source(c.program));
    const auto v = resolve_vulnerability(p, load_vulnerability_request(c.vuln));
    const std::string once = export_graph(p, v);
    const GraphImport gi = import_graph(once);
    EXPECT_EQ(export_graph(gi.program, resolve_vulnerability(gi.program, *gi.vulnerable)), once)
        << c.name;

    // The imported structure yields the same candidates.
    const auto locs = candidate_locations(build_program_path_graph(p, v), p);
    const auto v2 = resolve_vulnerability(gi.program, *gi.vulnerable);
    const auto locs2 =
        candidate_locations(build_program_path_graph(gi.program, v2), gi.program);
    EXPECT_EQ(locs, locs2) << c.name;
  }
}

TEST(GraphIo, ZeroPatchReport) {
  const IRProgram p = compile_text("fn main() -> int {\n  let a: ref = alloc(1);\n"
                                   "  print(a[read()]);\n  return 0;\n}\n");
  VulnerabilityRequest req;
  req.function = "main";
  req.line = 3;
  ReportMeta meta;
  meta.program = "t.mini";
  meta.vulnerable = resolve_vulnerability(p, req);
  meta.levels = 1;
  const Report r = export_report(p, {}, meta);
  const json doc = json::parse(r.json);
  EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(doc["summary"]["patches"], 0);
  EXPECT_EQ(doc["summary"]["levels"], 0);
  EXPECT_EQ(doc["summary"]["best_pfr"], "0");
  EXPECT_TRUE(doc["rows"].empty());
  EXPECT_NE(r.text.find("# patches: 0"), std::string::npos);
}

TEST(GraphIo, ReportRows) {
  const IRProgram p = compile(load_source(corpus_path("bmp_like/bmp_like.mini")));
  const auto v = resolve_vulnerability(p, load_vulnerability_request(corpus_path("bmp_like/vuln.json")));
  const auto ppg = build_program_path_graph(p, v);
  TestSuite suite = load_suite(corpus_path("bmp_like/suite.txt"));
  suite.exploit = Exploit{v.exploit->input, v.exploit->kind, v.statement};
  const auto evals = rank(evaluate_patches(p, synthesize_patches(p, candidate_locations(ppg, p)), suite));
  ReportMeta meta;
  meta.program = "bmp_like.mini";
  meta.vulnerable = v;
  meta.levels = static_cast<int>(ppg.max_levels());
  const json doc = json::parse(export_report(p, evals, meta).json);
  EXPECT_EQ(doc["summary"]["patches"], evals.size());
  EXPECT_EQ(doc["summary"]["levels"], 3);
  EXPECT_EQ(doc["summary"]["best_pfr"], "85 (98%)");
  EXPECT_EQ(doc["summary"]["best_patch_level"], 1);
  const auto &row = doc["rows"][0];
  EXPECT_EQ(row["rank"], 1);
  EXPECT_EQ(row["display"], "85 (98%)");
  EXPECT_EQ(row["pfr"], "85/87");
  EXPECT_EQ(row["pfr_percent"], 98);
  EXPECT_EQ(row["exploit_blocked"], true);
  EXPECT_EQ(row["patch"], "return nil;");
  EXPECT_EQ(row["line"], 40);
}
