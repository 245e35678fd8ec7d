#pragma once

#include <vector>

#include "paver/path_analysis.hpp"

namespace paver {

struct CandidatePatchLocation {
  FunctionId function;
  BlockId block = 0;
  BlockId governing_conditional = 0;
  int branch = 0;
  FunctionId governing_function; // differs from `function` only when the
                                 // governing condition itself makes the call
  int level = 0; // 0 = vulnerable function, 1 = direct caller, ...

  auto operator<=>(const CandidatePatchLocation &) const = default;
};

/// First non-conditional successor of every conditional block on a vulnerable
/// path. Deduplicated by (function, block); ordered by level descending, then
/// block id, then function. A path whose conditionals lead straight into the
/// vulnerable block yields the vulnerable block itself, with a warning.
std::vector<CandidatePatchLocation> candidate_locations(const ProgramPathGraph &ppg,
                                                        const IRProgram &p,
                                                        Diagnostics *diags = nullptr);

/// Smallest frame distance from the vulnerable function over all chains
/// through `loc.function`.
int patch_level(const CandidatePatchLocation &loc, const ProgramPathGraph &ppg);

} // namespace paver
