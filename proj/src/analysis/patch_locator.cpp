#include "paver/patch_locator.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

namespace paver {

int patch_level(const CandidatePatchLocation &loc, const ProgramPathGraph &ppg) {
  int best = std::numeric_limits<int>::max();
  for (const auto &c : ppg.chains)
    for (const auto &fr : c.frames)
      if (fr.function == loc.function)
        best = std::min(best, fr.level);
  return best == std::numeric_limits<int>::max() ? loc.level : best;
}

std::vector<CandidatePatchLocation> candidate_locations(const ProgramPathGraph &ppg,
                                                        const IRProgram &p,
                                                        Diagnostics *diags) {
  using Key = std::pair<FunctionId, BlockId>;
  std::map<Key, CandidatePatchLocation> found;
  bool any_conditional = false;
  bool degenerate = false;

  auto offer = [&](CandidatePatchLocation loc) {
    Key k{loc.function, loc.block};
    auto it = found.find(k);
    if (it == found.end())
      found.emplace(k, std::move(loc));
    else if (std::tie(loc.governing_function, loc.governing_conditional, loc.branch) <
             std::tie(it->second.governing_function, it->second.governing_conditional,
                      it->second.branch))
      it->second = std::move(loc);
  };

  for (const auto &chain : ppg.chains) {
    const std::size_t last = chain.frames.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
      const FramePaths &fr = chain.frames[i];
      const IRFunction &f = p.function(fr.function);

      // Resolves the on-path successor `b` (in frame j) of a conditional in
      // frame i: a non-conditional block is the candidate; a conditional call
      // site is stepped through into the callee's entry.
      auto settle = [&](BlockId gov, int branch, std::size_t j, BlockId b) {
        for (;;) {
          const FramePaths &cur = chain.frames[j];
          const IRFunction &cf = p.function(cur.function);
          const bool is_target = b == cur.dag.to;
          if (!cf.block(b).is_conditional() || (is_target && j == last)) {
            if (cf.block(b).is_conditional())
              degenerate = true;
            offer({cur.function, b, gov, branch, fr.function, cur.level});
            return;
          }
          if (!is_target)
            return; // that conditional contributes its own successors
          ++j;
          b = chain.frames[j].dag.from;
        }
      };

      for (BlockId c : fr.dag.nodes) {
        if (!f.block(c).is_conditional())
          continue;
        any_conditional = true;
        if (c == fr.dag.to) {
          // The condition itself performs the call that continues the path.
          if (i < last)
            settle(c, 0, i + 1, chain.frames[i + 1].dag.from);
          continue;
        }
        for (const DagEdge &e : fr.dag.out_edges(c))
          settle(c, e.branch, i, e.to);
      }
    }
  }

  if (!any_conditional)
    warn(diags, "no-conditionals",
         "no conditional block lies on a vulnerable path; no candidate locations");
  if (degenerate)
    warn(diags, "degenerate-path",
         "a vulnerable path reaches the vulnerable block through conditionals only; "
         "the vulnerable block itself is a candidate");

  std::vector<CandidatePatchLocation> out;
  for (auto &[k, loc] : found) {
    loc.level = patch_level(loc, ppg);
    out.push_back(loc);
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(b.level, a.block, a.function) < std::tie(a.level, b.block, b.function);
  });
  return out;
}

} // namespace paver
