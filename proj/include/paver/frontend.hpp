#pragma once

#include <string>

#include "paver/ast.hpp"
#include "paver/ir.hpp"

namespace paver {

struct SourceUnit {
  std::string path;
  std::string text;
};

/// Reads a `.mini` file. Throws paver::Error (Input) if it cannot be read.
SourceUnit load_source(const std::string &path);

/// Parses, name-resolves and type-checks MiniLang. Throws ParseError with a
/// line and column on syntax errors, duplicate function names and type
/// mismatches.
ast::Program parse(const SourceUnit &src);

/// Lowers a parsed program to IR; the entry function is `main`.
IRProgram lower(const ast::Program &tree);

/// parse + lower.
IRProgram compile(const SourceUnit &src);

/// Renders a MiniLang-lowered program (including applied patches, which
/// appear as explicit `return <errval>;` lines) back to source. Throws for
/// graph-imported programs.
SourceUnit pretty_print(const IRProgram &p);

/// MiniLang spelling of an expression, parenthesized so it re-parses to the
/// same tree.
std::string to_source(const ast::Expr &e);

} // namespace paver
