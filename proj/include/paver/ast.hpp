#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paver/types.hpp"

// Structured MiniLang syntax tree. The parser produces it name-resolved and
// type-checked: variable slots, call kinds and result types are filled in.
namespace paver::ast {

enum class ExprKind {
  IntLit,
  BoolLit,
  Nil,
  Var,
  FnRef, // &name
  Unary,
  Binary,
  Index, // a[i]
  Call,
  Alloc, // alloc(n)
  Len,   // len(a)
  Read,  // read()
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  int line = 0;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string name; // variable, function reference or callee
  std::string op;   // unary / binary operator spelling
  std::vector<ExprPtr> args;

  // Filled by name resolution.
  int slot = -1;              // Var, and Call when via_reference
  bool via_reference = false; // Call through a function-reference value
  ValueType type;             // result type
};

enum class StmtKind {
  Let,         // let x: T = e;  (or declaration only)
  Assign,      // x = e;
  IndexAssign, // a[i] = e;
  If,
  While,
  Return,
  Print,
  Assert,
  ExprStmt, // call used as a statement
  Halt,
};

struct Stmt {
  StmtKind kind = StmtKind::ExprStmt;
  int line = 0;

  std::string name;     // Let / Assign target
  int slot = -1;        // resolved target slot
  bool has_type = false; // Let with explicit annotation
  ValueType declared;
  bool has_init = true; // Let without initializer emits no code

  ExprPtr target; // IndexAssign array
  ExprPtr index;  // IndexAssign index
  ExprPtr value;  // initializer, rhs, condition, return value, printed value

  std::vector<Stmt> then_body; // If then-branch, While body
  std::vector<Stmt> else_body;
  bool has_else = false;
};

struct Param {
  std::string name;
  ValueType type;
};

struct Function {
  std::string name;
  int line = 0;
  int end_line = 0; // closing brace
  std::vector<Param> params;
  TypeKind ret = TypeKind::Unit;
  bool is_external = false;
  std::optional<Constant> error_annotation;
  std::vector<Stmt> body;

  // Flat local namespace; parameters occupy the first slots.
  std::vector<Param> locals;

  ValueType signature() const;
};

struct Program {
  std::string file;
  std::vector<std::shared_ptr<const Function>> functions;

  const Function *find(const std::string &name) const;
};

/// Visits every statement list in a function body in a fixed pre-order. The
/// visit order defines the list ids that block anchors refer to.
template <typename Fn>
void for_each_list(const std::vector<Stmt> &body, Fn &&fn) {
  int next_id = 0;
  auto walk = [&](auto &&self, const std::vector<Stmt> &list) -> void {
    fn(next_id++, list);
    for (const auto &s : list) {
      if (s.kind == StmtKind::If) {
        self(self, s.then_body);
        if (s.has_else)
          self(self, s.else_body);
      } else if (s.kind == StmtKind::While) {
        self(self, s.then_body);
      }
    }
  };
  walk(walk, body);
}

} // namespace paver::ast
