#pragma once

#include <string>

#include "paver/analysis.hpp"
#include "paver/patch_locator.hpp"

namespace paver {

struct ErrorReturnValue {
  enum class Provenance { Annotation, MinedFromErrorPath, TypeDefault };

  Constant value;
  Provenance provenance = Provenance::TypeDefault;

  bool operator==(const ErrorReturnValue &) const = default;
};

std::string to_string(ErrorReturnValue::Provenance p);

/// Error value for `f`, by precedence: the @error annotation; the most frequent
/// constant returned from a control-dependent block (ties to the smallest);
/// the type default (-1, false, nil, plain return).
ErrorReturnValue infer_error_return(const IRFunction &f, const ControlDepGraph &cdg);
ErrorReturnValue infer_error_return(const IRFunction &f);

struct Patch {
  int id = 0;
  CandidatePatchLocation location;
  ErrorReturnValue errval;
};

/// Throws paver::Error (Analysis) when the value does not match the host
/// function's return type.
Patch synthesize_patch(int id, const IRFunction &host, const CandidatePatchLocation &loc,
                       const ErrorReturnValue &errval);

/// One patch per candidate, ids in candidate order starting at 1.
std::vector<Patch> synthesize_patches(const IRProgram &p,
                                      const std::vector<CandidatePatchLocation> &locs);

/// Returns a copy of `p` whose located block returns the error value at once.
/// Idempotent. Throws paver::Error (Analysis) for stale locations.
IRProgram apply_patch(const IRProgram &p, const Patch &patch);

/// All patches applied to one copy.
IRProgram apply_patches(const IRProgram &p, const std::vector<Patch> &patches);

/// MiniLang spelling of the inserted statement: `return nil;`, `return;`, ...
std::string patch_source(const Patch &patch);

} // namespace paver
