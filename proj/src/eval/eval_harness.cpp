#include "paver/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <thread>
#include <tuple>

namespace paver {

bool Rational::operator==(const Rational &o) const { return (*this <=> o) == 0; }

std::strong_ordering Rational::operator<=>(const Rational &o) const {
  const __int128 l = static_cast<__int128>(den == 0 ? 0 : num) * (o.den == 0 ? 1 : o.den);
  const __int128 r = static_cast<__int128>(o.den == 0 ? 0 : o.num) * (den == 0 ? 1 : den);
  return l <=> r;
}

SuiteResult run_test_suite(const IRProgram &p, const TestSuite &suite,
                           const ExecutionLimits &limits) {
  SuiteResult r;
  r.total = static_cast<int>(suite.cases.size());
  for (const auto &tc : suite.cases) {
    const ExecutionResult res = run_program(p, tc.input, limits);
    bool pass;
    if (tc.expect_fault)
      pass = res.status == ExecutionResult::Status::Fault &&
             (!tc.fault_kind || *tc.fault_kind == res.fault);
    else
      pass = res.ok() && res.output == tc.expected;
    r.passed += pass;
    r.verdicts.push_back({tc.name, pass, res.status});
  }
  return r;
}

bool check_exploit(const IRProgram &p, const Exploit &exploit, const ExecutionLimits &limits) {
  return !run_program(p, exploit.input, limits).faulted_at(exploit.statement);
}

bool check_exploit(const IRProgram &p, const TestSuite &suite, const ExecutionLimits &limits) {
  if (!suite.exploit)
    throw Error(ErrorKind::Usage, "test suite has no exploit to check");
  return check_exploit(p, *suite.exploit, limits);
}

std::vector<PatchEvaluation> evaluate_patches(const IRProgram &base,
                                              const std::vector<Patch> &patches,
                                              const TestSuite &suite,
                                              const EvalOptions &opts) {
  if (!base.executable)
    throw Error(ErrorKind::Usage,
                "graph-imported programs cannot be executed; evaluation needs MiniLang");

  std::vector<TraceEntry> exploit_trace;
  if (suite.exploit)
    exploit_trace = run_program(base, suite.exploit->input, opts.limits, true).trace;

  std::vector<PatchEvaluation> out(patches.size());
  auto evaluate = [&](std::size_t i) {
    PatchEvaluation &ev = out[i];
    ev.patch = patches[i];
    ev.total = static_cast<int>(suite.cases.size());
    ev.pfr = {0, ev.total};
    const auto &loc = ev.patch.location;
    ev.on_exploit_path =
        std::any_of(exploit_trace.begin(), exploit_trace.end(), [&](const TraceEntry &t) {
          return t.function == loc.function && t.block == loc.block;
        });
    try {
      const IRProgram variant = apply_patch(base, ev.patch);
      const SuiteResult r = run_test_suite(variant, suite, opts.limits);
      ev.passed = r.passed;
      ev.pfr = {r.passed, r.total};
      if (suite.exploit) {
        ev.exploit_checked = true;
        ev.exploit_blocked = check_exploit(variant, *suite.exploit, opts.limits);
      }
    } catch (const std::exception &e) {
      ev.error = e.what();
    }
  };

  const std::size_t jobs =
      std::max<std::size_t>(1, std::min<std::size_t>(opts.jobs, patches.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < patches.size(); ++i)
      evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < patches.size();)
          evaluate(i);
      });
    for (auto &th : pool)
      th.join();
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.patch.id < b.patch.id;
  });
  return out;
}

bool rank_before(const PatchEvaluation &a, const PatchEvaluation &b) {
  if (a.pfr != b.pfr)
    return a.pfr > b.pfr;
  if (a.exploit_blocked != b.exploit_blocked)
    return a.exploit_blocked;
  const auto &la = a.patch.location;
  const auto &lb = b.patch.location;
  return std::tie(la.level, la.block, la.function, a.patch.id) <
         std::tie(lb.level, lb.block, lb.function, b.patch.id);
}

std::vector<PatchEvaluation> rank(std::vector<PatchEvaluation> evals) {
  std::sort(evals.begin(), evals.end(), rank_before);
  for (std::size_t i = 0; i < evals.size(); ++i)
    evals[i].rank = static_cast<int>(i + 1);
  return evals;
}

std::vector<std::vector<std::int64_t>> fuzz_inputs(const TestSuite &suite, std::uint64_t seed,
                                                   int count) {
  std::vector<std::vector<std::int64_t>> seeds;
  if (suite.exploit)
    seeds.push_back(suite.exploit->input);
  for (const auto &tc : suite.cases)
    seeds.push_back(tc.input);
  std::size_t max_len = 4;
  std::vector<std::int64_t> pool{0, 1, -1, 2};
  for (const auto &s : seeds) {
    max_len = std::max(max_len, s.size());
    pool.insert(pool.end(), s.begin(), s.end());
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  // Raw engine output only, so the sequence does not depend on the standard
  // library's distribution implementations.
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t n) { return n ? rng() % n : 0; };
  std::vector<std::vector<std::int64_t>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<std::int64_t> in;
    const auto mode = below(3);
    if (mode == 0 && !seeds.empty()) {
      in = seeds[below(seeds.size())];
    } else if (mode == 1 && !seeds.empty()) {
      in = seeds[below(seeds.size())];
      for (auto &v : in)
        if (below(3) == 0)
          v = below(2) ? pool[below(pool.size())] : v + static_cast<std::int64_t>(below(5)) - 2;
      if (below(4) == 0)
        in.push_back(pool[below(pool.size())]);
    } else {
      const auto len = below(max_len + 3);
      for (std::uint64_t k = 0; k < len; ++k)
        in.push_back(below(2) ? pool[below(pool.size())]
                              : static_cast<std::int64_t>(below(41)) - 20);
    }
    out.push_back(std::move(in));
  }
  return out;
}

int pfr_percent(int passed, int total) {
  if (total <= 0)
    return 0;
  return static_cast<int>((200LL * passed + total) / (2LL * total));
}

std::string pfr_display(int passed, int total) {
  if (passed == 0)
    return "0";
  return std::to_string(passed) + " (" + std::to_string(pfr_percent(passed, total)) + "%)";
}

} // namespace paver
