#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paver/ast.hpp"
#include "paver/types.hpp"

namespace paver {

using FunctionId = std::string;
using BlockId = int;
using StatementId = std::int64_t;

/// Classification of a statement, as consumed by the analyses and reports.
enum class StmtKind {
  Assign,
  ArrayRead,
  ArrayWrite,
  Call,
  Print,
  ReadInput,
  Assert,
  Nop,
  Condition, // the condition evaluated by a branch terminator
  Return,    // the (optional) value evaluated by a return terminator
  Halt,
};

std::string to_string(StmtKind kind);

/// What the interpreter does with a statement.
enum class StmtOp { Nop, Store, IndexStore, Print, Assert, Eval, Cond, Ret, Halt };

struct CallSite {
  std::string callee; // function name, or the reference variable's name
  bool via_reference = false;
  ValueType ref_type; // signature of the reference when via_reference
};

struct Statement {
  StatementId id = 0;
  StmtKind kind = StmtKind::Nop;
  StmtOp op = StmtOp::Nop;
  int line = 0;

  int slot = -1;       // Store target
  ast::ExprPtr array;  // IndexStore array
  ast::ExprPtr index;  // IndexStore index
  ast::ExprPtr value;  // stored value, printed value, condition, return value

  std::vector<CallSite> calls; // every call evaluated by this statement
};

enum class TermKind { Jump, Branch, Return, Halt };

struct Terminator {
  TermKind kind = TermKind::Return;
  BlockId then_target = -1; // jump target, or branch index 0
  BlockId else_target = -1; // branch index 1
  std::optional<Statement> stmt; // condition / return value / halt
  bool implicit = false;         // fall-off-the-end return added by lowering
};

/// Position of a block's first statement in the structured source: the
/// pre-order id of a statement list and the index within it.
struct Anchor {
  int list = 0;
  int index = 0;
  bool operator==(const Anchor &) const = default;
};

struct BasicBlock {
  BlockId id = 0;
  std::string label;
  std::vector<Statement> statements;
  Terminator term;
  bool dead = false;
  int line = 0;
  std::optional<Anchor> anchor;

  /// Single source of truth for the "conditional basic block" label.
  bool is_conditional() const { return term.kind == TermKind::Branch; }

  /// Successors in branch-index order (0 then 1).
  std::vector<BlockId> successors() const;
};

struct AppliedPatch {
  BlockId block = 0;
  Constant value;
};

struct IRFunction {
  FunctionId id;
  std::vector<ast::Param> params;
  TypeKind return_type = TypeKind::Unit;
  std::vector<BasicBlock> blocks; // indexed by BlockId
  BlockId entry_block = 0;
  std::optional<Constant> declared_error_return;
  bool is_external = false;
  bool address_taken = false;
  int num_slots = 0;

  std::shared_ptr<const ast::Function> source; // null when graph-imported
  std::vector<AppliedPatch> patches;

  ValueType signature() const;
  const BasicBlock &block(BlockId b) const { return blocks.at(static_cast<std::size_t>(b)); }
  std::optional<BlockId> find_block(const std::string &label) const;
};

struct SourceLoc {
  std::string file;
  int line = 0;
  bool patched = false;
};

struct IRProgram {
  std::map<FunctionId, IRFunction> functions;
  FunctionId entry;
  std::map<StatementId, SourceLoc> source_map;
  std::string file;
  bool executable = true; // false for graph-imported programs

  const IRFunction &function(const FunctionId &id) const;
  const IRFunction *find(const FunctionId &id) const;

  /// Locates a statement anywhere in the program: (function, block).
  std::optional<std::pair<FunctionId, BlockId>> locate(StatementId id) const;

  StatementId max_statement_id() const;
};

/// Statement-list lowering context shared with the frontend. Statement ids
/// continue from `next_statement_id`, which is advanced.
struct CfgBuildContext {
  std::string file;
  StatementId next_statement_id = 1;
  std::map<StatementId, SourceLoc> *source_map = nullptr;
};

/// Builds the CFG of one structured function body. Every `if` and `while`
/// gets a block of its own whose branch terminator evaluates the condition;
/// an empty current block is reused for that purpose. Throws paver::Error on
/// malformed bodies.
IRFunction build_cfg(const std::shared_ptr<const ast::Function> &fn,
                     CfgBuildContext &ctx);

/// Recomputes the `dead` flag of every block from entry reachability.
void mark_dead_blocks(IRFunction &fn);

/// Checks the structural invariants of a single function (edge targets,
/// conditional <=> out-degree 2, entry exists). Throws on violation.
void verify_function(const IRFunction &fn);

/// Checks program-level invariants: entry exists, statement ids unique,
/// direct callees exist.
void verify_program(const IRProgram &p);

} // namespace paver
