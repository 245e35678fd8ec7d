#include "paver/patch_synth.hpp"

#include <algorithm>
#include <map>

namespace paver {

std::string to_string(ErrorReturnValue::Provenance p) {
  switch (p) {
  case ErrorReturnValue::Provenance::Annotation: return "annotation";
  case ErrorReturnValue::Provenance::MinedFromErrorPath: return "mined_from_error_path";
  case ErrorReturnValue::Provenance::TypeDefault: return "type_default";
  }
  return "?";
}

namespace {

std::optional<Constant> constant_of(const ast::Expr *e) {
  if (!e)
    return std::nullopt;
  switch (e->kind) {
  case ast::ExprKind::IntLit: return Constant::integer(e->int_value);
  case ast::ExprKind::BoolLit: return Constant::boolean(e->bool_value);
  case ast::ExprKind::Nil: return Constant::nil();
  default: return std::nullopt;
  }
}

Constant type_default(TypeKind k) {
  switch (k) {
  case TypeKind::Int: return Constant::integer(-1);
  case TypeKind::Bool: return Constant::boolean(false);
  case TypeKind::Ref: return Constant::nil();
  default: return Constant::unit();
  }
}

ast::ExprPtr literal(const Constant &c, int line) {
  if (c.type == TypeKind::Unit)
    return nullptr;
  auto e = std::make_shared<ast::Expr>();
  e->line = line;
  e->type = ValueType::of(c.type);
  switch (c.type) {
  case TypeKind::Int:
    e->kind = ast::ExprKind::IntLit;
    e->int_value = c.value;
    break;
  case TypeKind::Bool:
    e->kind = ast::ExprKind::BoolLit;
    e->bool_value = c.value != 0;
    break;
  default:
    e->kind = ast::ExprKind::Nil;
    break;
  }
  return e;
}

} // namespace

ErrorReturnValue infer_error_return(const IRFunction &f, const ControlDepGraph &cdg) {
  if (f.declared_error_return)
    return {*f.declared_error_return, ErrorReturnValue::Provenance::Annotation};

  std::map<Constant, int> counts;
  for (const auto &b : f.blocks) {
    if (b.dead || b.term.kind != TermKind::Return || b.term.implicit || !b.term.stmt)
      continue;
    if (!cdg.is_governed(b.id))
      continue;
    auto c = constant_of(b.term.stmt->value.get());
    if (c && c->type == f.return_type)
      ++counts[*c];
  }
  if (!counts.empty()) {
    // std::map iterates smallest first, so strict > keeps the smallest on ties.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
      if (it->second > best->second)
        best = it;
    return {best->first, ErrorReturnValue::Provenance::MinedFromErrorPath};
  }
  return {type_default(f.return_type), ErrorReturnValue::Provenance::TypeDefault};
}

ErrorReturnValue infer_error_return(const IRFunction &f) {
  return infer_error_return(f, compute_control_dependencies(f));
}

Patch synthesize_patch(int id, const IRFunction &host, const CandidatePatchLocation &loc,
                       const ErrorReturnValue &errval) {
  if (host.id != loc.function)
    throw_analysis("patch location in '" + loc.function + "' synthesized against '" +
                   host.id + "'");
  if (errval.value.type != host.return_type)
    throw_analysis(host.id + ": error value of type " + to_string(errval.value.type) +
                   " does not match return type " + to_string(host.return_type));
  return Patch{id, loc, errval};
}

std::vector<Patch> synthesize_patches(const IRProgram &p,
                                      const std::vector<CandidatePatchLocation> &locs) {
  std::map<FunctionId, ErrorReturnValue> errvals;
  std::vector<Patch> out;
  int id = 1;
  for (const auto &loc : locs) {
    const IRFunction &f = p.function(loc.function);
    auto it = errvals.find(f.id);
    if (it == errvals.end())
      it = errvals.emplace(f.id, infer_error_return(f)).first;
    out.push_back(synthesize_patch(id++, f, loc, it->second));
  }
  return out;
}

IRProgram apply_patch(const IRProgram &p, const Patch &patch) {
  const auto &loc = patch.location;
  const IRFunction *orig = p.find(loc.function);
  if (!orig || orig->is_external || loc.block < 0 ||
      static_cast<std::size_t>(loc.block) >= orig->blocks.size())
    throw_analysis("patch " + std::to_string(patch.id) + ": location " + loc.function +
                   "/" + std::to_string(loc.block) + " does not exist");
  if (patch.errval.value.type != orig->return_type)
    throw_analysis("patch " + std::to_string(patch.id) + ": error value type mismatch");

  IRProgram out = p;
  IRFunction &f = out.functions.at(loc.function);
  auto same = std::find_if(f.patches.begin(), f.patches.end(), [&](const AppliedPatch &a) {
    return a.block == loc.block;
  });
  if (same != f.patches.end()) {
    if (same->value == patch.errval.value)
      return out;
    f.patches.erase(same);
  }

  BasicBlock &b = f.blocks[static_cast<std::size_t>(loc.block)];
  const int line = b.line;
  Statement ret;
  ret.id = out.max_statement_id() + 1;
  ret.kind = StmtKind::Return;
  ret.op = StmtOp::Ret;
  ret.line = line;
  ret.value = literal(patch.errval.value, line);

  b.statements.clear();
  b.term = Terminator{};
  b.term.kind = TermKind::Return;
  b.term.stmt = ret;
  out.source_map[ret.id] = SourceLoc{out.file, line, true};
  f.patches.push_back({loc.block, patch.errval.value});
  mark_dead_blocks(f);
  return out;
}

IRProgram apply_patches(const IRProgram &p, const std::vector<Patch> &patches) {
  IRProgram out = p;
  for (const auto &patch : patches)
    out = apply_patch(out, patch);
  return out;
}

std::string patch_source(const Patch &patch) {
  const std::string v = to_source(patch.errval.value);
  return v.empty() ? "return;" : "return " + v + ";";
}

} // namespace paver
