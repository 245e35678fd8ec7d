#include <gtest/gtest.h>

#include "oracles.hpp"
#include "paver/patch_locator.hpp"

using namespace paver;
using namespace paver::testing;

// Every fixture is only meaningful if the unpatched program passes its whole
// suite and its exploit really faults at the vulnerable statement.
TEST(Corpus, UnpatchedBaseline) {
  const auto corpus = minilang_corpus();
  ASSERT_GE(corpus.size(), 7u);
  for (const auto &c : corpus) {
    const IRProgram p = compile(load_source(c.program));
    const auto v = resolve_vulnerability(p, load_vulnerability_request(c.vuln));
    const TestSuite suite = load_suite(c.suite);
    const SuiteResult r = run_test_suite(p, suite);
    EXPECT_EQ(r.passed, r.total) << c.name;
    EXPECT_GT(r.total, 0) << c.name;
    ASSERT_TRUE(v.exploit) << c.name;
    const auto res = run_program(p, v.exploit->input);
    EXPECT_TRUE(res.faulted_at(v.statement)) << c.name;
    EXPECT_EQ(res.fault, v.exploit->kind) << c.name;
  }
}

TEST(Corpus, SuitesNeverTriggerTheVulnerability) {
  for (const auto &c : minilang_corpus()) {
    const IRProgram p = compile(load_source(c.program));
    const auto v = resolve_vulnerability(p, load_vulnerability_request(c.vuln));
    for (const auto &tc : load_suite(c.suite).cases)
      EXPECT_FALSE(run_program(p, tc.input).faulted_at(v.statement)) << c.name << " " << tc.name;
  }
}

TEST(Corpus, AllMandatoryBreaksEveryTest) {
  const IRProgram p = compile(load_source(corpus_path("all_mandatory/all_mandatory.mini")));
  const auto v = resolve_vulnerability(
      p, load_vulnerability_request(corpus_path("all_mandatory/vuln.json")));
  const auto patches =
      synthesize_patches(p, candidate_locations(build_program_path_graph(p, v), p));
  ASSERT_FALSE(patches.empty());
  for (const auto &e : evaluate_patches(p, patches, load_suite(corpus_path("all_mandatory/suite.txt"))))
    EXPECT_EQ(e.passed, 0) << e.patch.id;
}

TEST(Corpus, MissingUndoLeavesLockHeld) {
  const IRProgram p = compile(load_source(corpus_path("undo_side_effect/undo_side_effect.mini")));
  const auto v = resolve_vulnerability(
      p, load_vulnerability_request(corpus_path("undo_side_effect/vuln.json")));
  const auto patches =
      synthesize_patches(p, candidate_locations(build_program_path_graph(p, v), p));
  const BlockId vb = p.locate(v.statement)->second;
  const auto it = std::find_if(patches.begin(), patches.end(), [&](const Patch &x) {
    return x.location.function == "write_record" && x.location.block == vb;
  });
  ASSERT_NE(it, patches.end());
  const IRProgram q = apply_patch(p, *it);
  // An extended write, then an ordinary one. The second is refused because the
  // patched return skipped the unlock.
  const std::vector<std::int64_t> input{2, 3, 7, 0, 5};
  EXPECT_EQ(run_program(p, input).output, (std::vector<std::int64_t>{0, 0, 1012}));
  EXPECT_EQ(run_program(q, input).output, (std::vector<std::int64_t>{-2, -2, 0}));
}

TEST(Corpus, AnnotatedErrorValueIsUsed) {
  const IRProgram p = compile(load_source(corpus_path("funcref/funcref.mini")));
  const auto ev = infer_error_return(p.function("lookup"));
  EXPECT_EQ(ev.value, Constant::integer(-99));
  EXPECT_EQ(ev.provenance, ErrorReturnValue::Provenance::Annotation);
}
