#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paver/ir.hpp"

namespace paver {

enum class FaultKind { Oob, DivZero, NilDeref, AssertFail, Resource };

std::string to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(const std::string &text);

struct ExecutionLimits {
  std::int64_t max_steps = 1'000'000;
  std::int64_t max_heap_cells = 1'000'000;
  int max_call_depth = 2'000;
};

struct TraceEntry {
  FunctionId function;
  BlockId block = 0;
  bool operator==(const TraceEntry &) const = default;
};

struct ExecutionResult {
  enum class Status { Ok, Fault, Timeout, InputExhausted };

  Status status = Status::Ok;
  std::int64_t exit_value = 0;      // Ok
  FaultKind fault = FaultKind::Oob; // Fault
  StatementId fault_at = 0;         // Fault: last statement executed
  std::vector<std::int64_t> output;
  std::vector<TraceEntry> trace; // filled when tracing is requested
  std::int64_t steps = 0;

  bool ok() const { return status == Status::Ok; }
  bool faulted_at(StatementId s) const { return status == Status::Fault && fault_at == s; }
  bool operator==(const ExecutionResult &) const = default;
};

std::string to_string(ExecutionResult::Status status);

/// Runs `main` of an executable program on a flat integer input list.
/// Deterministic; every abnormal outcome is encoded in the result status.
/// Throws paver::Error only for non-executable (graph-imported) programs.
ExecutionResult run_program(const IRProgram &p, const std::vector<std::int64_t> &input,
                            const ExecutionLimits &limits = {}, bool trace = false);

} // namespace paver
