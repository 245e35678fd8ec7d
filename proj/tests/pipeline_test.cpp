#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "paver/pipeline.hpp"

using namespace paver;
using namespace paver::testing;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

RunConfig corpus_config(const std::string &name) {
  RunConfig cfg;
  cfg.program = corpus_path(name + "/" + name + ".mini");
  cfg.vuln = corpus_path(name + "/vuln.json");
  cfg.suite = corpus_path(name + "/suite.txt");
  return cfg;
}

ErrorKind kind_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("paver_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST(Pipeline, InputModes) {
  EXPECT_EQ(parse_input_mode("graph"), InputMode::Graph);
  EXPECT_EQ(parse_input_mode("minilang"), InputMode::MiniLang);
  EXPECT_EQ(parse_input_mode("auto"), InputMode::Auto);
  EXPECT_FALSE(parse_input_mode("yaml"));
}

TEST(Pipeline, AllWritesEveryFile) {
  RunConfig cfg = corpus_config("two_path");
  const fs::path out = scratch("all");
  cfg.out = out.string();
  const PhaseOutput r = cmd_all(cfg);
  std::set<std::string> names;
  for (const auto &w : r.written)
    names.insert(fs::path(w).filename().string());
  EXPECT_EQ(names, (std::set<std::string>{"path_graph.json", "candidates.json", "report.json",
                                          "report.txt"}));
  for (const auto &n : names)
    EXPECT_TRUE(fs::exists(out / n));
  EXPECT_EQ(read_file((out / "report.json").string()), r.json);
  fs::remove_all(out);
}

TEST(Pipeline, NoOutputDirectoryWritesNothing) {
  const PhaseOutput r = cmd_locate(corpus_config("two_path"));
  EXPECT_TRUE(r.written.empty());
  EXPECT_FALSE(json::parse(r.json)["candidates"].empty());
}

TEST(Pipeline, GraphModeAnalyzeAndLocate) {
  RunConfig cfg;
  cfg.program = corpus_path("fig1/program.graph.json");
  const json a = json::parse(cmd_analyze(cfg).json);
  EXPECT_EQ(a["path_count"], 2);
  EXPECT_EQ(a["paths"].size(), 2u);
  const json l = json::parse(cmd_locate(cfg).json);
  std::set<std::string> blocks;
  for (const auto &c : l["candidates"])
    blocks.insert(c["block"].get<std::string>());
  EXPECT_EQ(blocks, (std::set<std::string>{"1", "2", "3", "4"}));

  const PhaseOutput all = cmd_all(cfg);
  EXPECT_NE(all.text.find("evaluation skipped"), std::string::npos);
  EXPECT_EQ(kind_of([&] { cmd_evaluate(cfg); }), ErrorKind::Usage);
}

TEST(Pipeline, ErrorKinds) {
  RunConfig missing = corpus_config("two_path");
  missing.program = "/nonexistent.mini";
  EXPECT_EQ(kind_of([&] { cmd_analyze(missing); }), ErrorKind::Usage);

  RunConfig no_suite = corpus_config("two_path");
  no_suite.suite.clear();
  EXPECT_EQ(kind_of([&] { cmd_evaluate(no_suite); }), ErrorKind::Usage);
  EXPECT_NO_THROW(cmd_locate(no_suite));

  RunConfig zero_jobs = corpus_config("two_path");
  zero_jobs.jobs = 0;
  EXPECT_EQ(kind_of([&] { cmd_evaluate(zero_jobs); }), ErrorKind::Usage);

  const fs::path dir = scratch("errors");
  fs::create_directories(dir);
  const std::string bad = (dir / "bad.mini").string();
  std::ofstream(bad) << "fn main() -> int {\n  return\n}\n";
  RunConfig parse = corpus_config("two_path");
  parse.program = bad;
  EXPECT_EQ(kind_of([&] { cmd_analyze(parse); }), ErrorKind::Input);

  const std::string unreachable = (dir / "unreachable.mini").string();
  std::ofstream(unreachable) << "fn f(a: ref) -> int {\n  return a[2];\n}\n"
                                "fn main() -> int {\n  return 0;\n}\n";
  const std::string vuln = (dir / "vuln.json").string();
  std::ofstream(vuln) << R"({"function": "f", "line": 2})";
  RunConfig unr;
  unr.program = unreachable;
  unr.vuln = vuln;
  EXPECT_EQ(kind_of([&] { cmd_analyze(unr); }), ErrorKind::Analysis);
  fs::remove_all(dir);
}

TEST(Pipeline, EvaluateReportsMitigation) {
  const json doc = json::parse(cmd_evaluate(corpus_config("bmp_like")).json);
  EXPECT_EQ(doc["program"], "bmp_like.mini");
  EXPECT_EQ(doc["summary"]["best_pfr"], "85 (98%)");
  EXPECT_EQ(doc["mitigation"]["static_cut"], true);
  EXPECT_EQ(doc["mitigation"]["fuzz_runs"], 100);
  EXPECT_EQ(doc["mitigation"]["fuzz_faults"], 0);
}

TEST(Pipeline, JobsDoNotChangeTheReport) {
  RunConfig one = corpus_config("three_chains");
  RunConfig eight = one;
  eight.jobs = 8;
  EXPECT_EQ(cmd_evaluate(one).json, cmd_evaluate(eight).json);
}
