#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "paver/paver.h"

namespace fs = std::filesystem;

namespace {

std::string corpus(const std::string &rel) { return std::string(PAVER_CORPUS_DIR) + "/" + rel; }

struct Config {
  paver_config *cfg = paver_config_create();
  ~Config() { paver_config_destroy(cfg); }
};

struct Result {
  paver_result *r = nullptr;
  ~Result() { paver_result_destroy(r); }
};

int cli(const std::string &args) {
  const std::string cmd = std::string(PAVER_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cli_output(const std::string &args) {
  const std::string cmd = std::string(PAVER_CLI) + " " + args + " 2>/dev/null";
  std::string out;
  if (FILE *f = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0)
      out.append(buf, n);
    pclose(f);
  }
  return out;
}

} // namespace

TEST(CApi, Version) { EXPECT_STREQ(paver_version(), "0.1.0"); }

TEST(CApi, EvaluateThroughHandles) {
  Config c;
  ASSERT_EQ(paver_config_set_program(c.cfg, corpus("bmp_like/bmp_like.mini").c_str()), PAVER_OK);
  ASSERT_EQ(paver_config_set_vuln(c.cfg, corpus("bmp_like/vuln.json").c_str()), PAVER_OK);
  ASSERT_EQ(paver_config_set_suite(c.cfg, corpus("bmp_like/suite.txt").c_str()), PAVER_OK);
  ASSERT_EQ(paver_config_set_jobs(c.cfg, 4), PAVER_OK);
  Result r;
  ASSERT_EQ(paver_evaluate(c.cfg, &r.r), PAVER_OK) << paver_last_error();
  ASSERT_NE(r.r, nullptr);
  EXPECT_NE(std::string(paver_result_json(r.r)).find("\"best_pfr\": \"85 (98%)\""),
            std::string::npos);
  EXPECT_NE(std::string(paver_result_text(r.r)).find("85 (98%)"), std::string::npos);
  EXPECT_EQ(paver_result_file_count(r.r), 0u);
  EXPECT_EQ(paver_result_file(r.r, 0), nullptr);
}

TEST(CApi, WritesFiles) {
  const fs::path out = fs::temp_directory_path() / "paver_capi_out";
  fs::remove_all(out);
  Config c;
  paver_config_set_program(c.cfg, corpus("fig1/program.graph.json").c_str());
  paver_config_set_out(c.cfg, out.string().c_str());
  Result r;
  ASSERT_EQ(paver_run_all(c.cfg, &r.r), PAVER_OK) << paver_last_error();
  EXPECT_EQ(paver_result_file_count(r.r), 2u);
  EXPECT_TRUE(fs::exists(out / "path_graph.json"));
  EXPECT_TRUE(fs::exists(out / "candidates.json"));
  fs::remove_all(out);
}

TEST(CApi, StatusCodes) {
  Config c;
  Result r;
  EXPECT_EQ(paver_analyze(c.cfg, &r.r), PAVER_ERR_USAGE);
  EXPECT_EQ(r.r, nullptr);
  EXPECT_NE(std::string(paver_last_error()).find("--program"), std::string::npos);

  EXPECT_EQ(paver_config_set_program(nullptr, "x"), PAVER_ERR_USAGE);
  EXPECT_EQ(paver_config_set_program(c.cfg, nullptr), PAVER_ERR_USAGE);
  EXPECT_EQ(paver_analyze(nullptr, &r.r), PAVER_ERR_USAGE);
  EXPECT_EQ(paver_config_set_jobs(c.cfg, 0), PAVER_ERR_USAGE);
  EXPECT_EQ(paver_config_set_cap(c.cfg, 0), PAVER_ERR_USAGE);

  paver_config_set_program(c.cfg, corpus("fig1/program.graph.json").c_str());
  paver_config_set_mode(c.cfg, PAVER_MODE_MINILANG);
  paver_config_set_vuln(c.cfg, corpus("bmp_like/vuln.json").c_str());
  EXPECT_EQ(paver_analyze(c.cfg, &r.r), PAVER_ERR_INPUT);

  paver_config_set_mode(c.cfg, PAVER_MODE_GRAPH);
  EXPECT_EQ(paver_evaluate(c.cfg, &r.r), PAVER_ERR_USAGE);

  paver_result_destroy(nullptr);
  EXPECT_STREQ(paver_result_json(nullptr), "");
}

TEST(Cli, ExitCodes) {
  const std::string bmp = "--program " + corpus("bmp_like/bmp_like.mini") + " --vuln " +
                          corpus("bmp_like/vuln.json");
  EXPECT_EQ(cli("locate " + bmp), 0);
  EXPECT_EQ(cli("evaluate " + bmp + " --suite " + corpus("bmp_like/suite.txt")), 0);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("analyze"), 2);
  EXPECT_EQ(cli("analyze --program /nonexistent.mini --vuln " + corpus("bmp_like/vuln.json")), 2);
  EXPECT_EQ(cli("evaluate " + bmp), 2);
  EXPECT_EQ(cli("analyze " + bmp + " --mode xml"), 2);
  EXPECT_EQ(cli("analyze " + bmp + " --jobs 0"), 2);
  EXPECT_EQ(cli("--help"), 0);

  const fs::path dir = fs::temp_directory_path() / "paver_cli_test";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.mini") << "fn main() -> int { return }\n";
  EXPECT_EQ(cli("analyze --program " + (dir / "bad.mini").string() + " --vuln " +
                corpus("bmp_like/vuln.json")),
            3);
  std::ofstream(dir / "dead.mini") << "fn f(a: ref) -> int {\n  return a[1];\n}\n"
                                      "fn main() -> int {\n  return 0;\n}\n";
  std::ofstream(dir / "vuln.json") << R"({"function": "f", "line": 2})";
  EXPECT_EQ(cli("analyze --program " + (dir / "dead.mini").string() + " --vuln " +
                (dir / "vuln.json").string()),
            4);
  fs::remove_all(dir);
}

TEST(Cli, PrintsJsonOnRequest) {
  const std::string out = cli_output("locate --json --program " + corpus("fig1/program.graph.json"));
  EXPECT_EQ(out.rfind("{", 0), 0u);
  EXPECT_NE(out.find("\"candidates\""), std::string::npos);
}
