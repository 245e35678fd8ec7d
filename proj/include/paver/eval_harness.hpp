#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paver/interpreter.hpp"
#include "paver/patch_synth.hpp"
#include "paver/test_suite.hpp"

namespace paver {

/// Exact non-negative fraction; 0/0 is treated as 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
  bool operator==(const Rational &o) const;
  std::strong_ordering operator<=>(const Rational &o) const;
};

struct CaseVerdict {
  std::string name;
  bool passed = false;
  ExecutionResult::Status status = ExecutionResult::Status::Ok;
};

struct SuiteResult {
  int passed = 0;
  int total = 0;
  std::vector<CaseVerdict> verdicts;
};

/// A case passes when the run ends normally with exactly the expected output,
/// or faults when a fault (of the given kind, if any) is expected.
SuiteResult run_test_suite(const IRProgram &p, const TestSuite &suite,
                           const ExecutionLimits &limits = {});

/// True iff the exploit input does NOT fault at the vulnerable statement.
bool check_exploit(const IRProgram &p, const Exploit &exploit,
                   const ExecutionLimits &limits = {});
bool check_exploit(const IRProgram &p, const TestSuite &suite,
                   const ExecutionLimits &limits = {});

struct PatchEvaluation {
  Patch patch;
  int passed = 0;
  int total = 0;
  Rational pfr;
  bool exploit_checked = false; // suite carried an exploit
  bool exploit_blocked = false;
  bool on_exploit_path = false; // the unpatched exploit run enters the block
  int rank = 0;
  std::optional<std::string> error; // variant could not be built
};

struct EvalOptions {
  ExecutionLimits limits;
  unsigned jobs = 1;
};

/// Applies each patch to a fresh copy and tests it. Results come back in patch
/// id order whatever the degree of parallelism.
std::vector<PatchEvaluation> evaluate_patches(const IRProgram &base,
                                              const std::vector<Patch> &patches,
                                              const TestSuite &suite,
                                              const EvalOptions &opts = {});

/// Orders by PFR descending, then exploit blocked first, lower level, block
/// id, function, patch id; assigns ranks 1..n.
std::vector<PatchEvaluation> rank(std::vector<PatchEvaluation> evals);
bool rank_before(const PatchEvaluation &a, const PatchEvaluation &b);

/// `count` seeded inputs built from the suite's and the exploit's inputs:
/// some verbatim, some mutated, some random. Identical for identical seeds.
std::vector<std::vector<std::int64_t>> fuzz_inputs(const TestSuite &suite, std::uint64_t seed,
                                                   int count);

/// round(100 * passed / total), halves rounded up. 0 for an empty suite.
int pfr_percent(int passed, int total);

/// Table display: `85 (98%)`, or `0` when nothing passed.
std::string pfr_display(int passed, int total);

} // namespace paver
