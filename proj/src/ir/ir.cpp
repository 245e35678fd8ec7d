#include "paver/ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "paver/error.hpp"

namespace paver {

std::string to_string(TypeKind kind) {
  switch (kind) {
  case TypeKind::Int: return "int";
  case TypeKind::Bool: return "bool";
  case TypeKind::Ref: return "ref";
  case TypeKind::Unit: return "unit";
  case TypeKind::Fn: return "fn";
  }
  return "?";
}

std::string to_string(const ValueType &type) {
  if (!type.is_fn())
    return to_string(type.kind);
  std::string s = "fn(";
  for (std::size_t i = 0; i < type.params.size(); ++i) {
    if (i)
      s += ", ";
    s += to_string(type.params[i]);
  }
  return s + ") -> " + to_string(type.ret);
}

std::string to_source(const Constant &c) {
  switch (c.type) {
  case TypeKind::Int: return std::to_string(c.value);
  case TypeKind::Bool: return c.value ? "true" : "false";
  case TypeKind::Ref: return "nil";
  default: return "";
  }
}

std::string to_string(StmtKind kind) {
  switch (kind) {
  case StmtKind::Assign: return "assign";
  case StmtKind::ArrayRead: return "array_read";
  case StmtKind::ArrayWrite: return "array_write";
  case StmtKind::Call: return "call";
  case StmtKind::Print: return "print";
  case StmtKind::ReadInput: return "read_input";
  case StmtKind::Assert: return "assert";
  case StmtKind::Nop: return "nop";
  case StmtKind::Condition: return "condition";
  case StmtKind::Return: return "return";
  case StmtKind::Halt: return "halt";
  }
  return "?";
}

std::vector<BlockId> BasicBlock::successors() const {
  switch (term.kind) {
  case TermKind::Jump: return {term.then_target};
  case TermKind::Branch: return {term.then_target, term.else_target};
  default: return {};
  }
}

ValueType IRFunction::signature() const {
  std::vector<TypeKind> kinds;
  for (const auto &p : params)
    kinds.push_back(p.type.kind);
  return ValueType::fn(std::move(kinds), return_type);
}

std::optional<BlockId> IRFunction::find_block(const std::string &label) const {
  for (const auto &b : blocks)
    if (b.label == label)
      return b.id;
  return std::nullopt;
}

const IRFunction &IRProgram::function(const FunctionId &id) const {
  auto it = functions.find(id);
  if (it == functions.end())
    throw_analysis("unknown function '" + id + "'");
  return it->second;
}

const IRFunction *IRProgram::find(const FunctionId &id) const {
  auto it = functions.find(id);
  return it == functions.end() ? nullptr : &it->second;
}

std::optional<std::pair<FunctionId, BlockId>>
IRProgram::locate(StatementId id) const {
  for (const auto &[name, fn] : functions) {
    for (const auto &b : fn.blocks) {
      for (const auto &s : b.statements)
        if (s.id == id)
          return std::make_pair(name, b.id);
      if (b.term.stmt && b.term.stmt->id == id)
        return std::make_pair(name, b.id);
    }
  }
  return std::nullopt;
}

StatementId IRProgram::max_statement_id() const {
  StatementId m = source_map.empty() ? 0 : source_map.rbegin()->first;
  for (const auto &[name, fn] : functions)
    for (const auto &b : fn.blocks) {
      for (const auto &s : b.statements)
        m = std::max(m, s.id);
      if (b.term.stmt)
        m = std::max(m, b.term.stmt->id);
    }
  return m;
}

namespace {

void collect_calls(const ast::Expr &e, const ast::Function &fn,
                   std::vector<CallSite> &out, bool &reads, bool &indexes) {
  if (e.kind == ast::ExprKind::Call) {
    CallSite site;
    site.callee = e.name;
    site.via_reference = e.via_reference;
    if (e.via_reference)
      site.ref_type = fn.locals.at(static_cast<std::size_t>(e.slot)).type;
    out.push_back(std::move(site));
  } else if (e.kind == ast::ExprKind::Read) {
    reads = true;
  } else if (e.kind == ast::ExprKind::Index) {
    indexes = true;
  }
  for (const auto &a : e.args)
    if (a)
      collect_calls(*a, fn, out, reads, indexes);
}

class CfgBuilder {
public:
  CfgBuilder(const std::shared_ptr<const ast::Function> &src,
             CfgBuildContext &ctx)
      : src_(*src), ctx_(ctx) {
    fn_.id = src_.name;
    fn_.params = src_.params;
    fn_.return_type = src_.ret;
    fn_.declared_error_return = src_.error_annotation;
    fn_.num_slots = static_cast<int>(src_.locals.size());
    fn_.source = src;
  }

  IRFunction build() {
    cur_ = new_block();
    lower_list(src_.body);
    if (cur_) {
      ast::ExprPtr value;
      if (src_.ret != TypeKind::Unit)
        value = default_value(src_.ret, src_.end_line);
      Terminator t;
      t.kind = TermKind::Return;
      t.implicit = true;
      t.stmt = make_stmt(StmtKind::Return, StmtOp::Ret, src_.end_line, value);
      close(std::move(t));
    }
    for (auto &b : fn_.blocks) {
      if (!b.statements.empty())
        b.line = b.statements.front().line;
      else if (b.term.stmt)
        b.line = b.term.stmt->line;
    }
    mark_dead_blocks(fn_);
    verify_function(fn_);
    return std::move(fn_);
  }

private:
  static ast::ExprPtr default_value(TypeKind type, int line) {
    auto e = std::make_shared<ast::Expr>();
    e->line = line;
    e->type = ValueType::of(type);
    switch (type) {
    case TypeKind::Int: e->kind = ast::ExprKind::IntLit; break;
    case TypeKind::Bool: e->kind = ast::ExprKind::BoolLit; break;
    default: e->kind = ast::ExprKind::Nil; break;
    }
    return e;
  }

  BlockId new_block() {
    BasicBlock b;
    b.id = static_cast<BlockId>(fn_.blocks.size());
    b.label = "bb" + std::to_string(b.id);
    fn_.blocks.push_back(std::move(b));
    return fn_.blocks.back().id;
  }

  BasicBlock &blk(BlockId id) { return fn_.blocks[static_cast<std::size_t>(id)]; }

  BlockId open() {
    if (!cur_)
      cur_ = new_block();
    return *cur_;
  }

  void close(Terminator t) {
    blk(*cur_).term = std::move(t);
    cur_.reset();
  }

  void jump_to(BlockId target) {
    Terminator t;
    t.kind = TermKind::Jump;
    t.then_target = target;
    close(std::move(t));
  }

  Statement make_stmt(StmtKind kind, StmtOp op, int line,
                      const ast::ExprPtr &value) {
    Statement s;
    s.id = ctx_.next_statement_id++;
    s.kind = kind;
    s.op = op;
    s.line = line;
    s.value = value;
    if (ctx_.source_map)
      (*ctx_.source_map)[s.id] = SourceLoc{ctx_.file, line, false};
    return s;
  }

  // Classification priority: calls, then input reads, then array accesses.
  Statement classify(Statement s, StmtKind base) {
    bool reads = false, indexes = false;
    for (const auto *e : {s.array.get(), s.index.get(), s.value.get()})
      if (e)
        collect_calls(*e, src_, s.calls, reads, indexes);
    if (!s.calls.empty())
      s.kind = StmtKind::Call;
    else if (reads)
      s.kind = StmtKind::ReadInput;
    else if (base == StmtKind::Assign && indexes)
      s.kind = StmtKind::ArrayRead;
    else
      s.kind = base;
    return s;
  }

  // A conditional gets a fresh block unless the current one is still empty.
  BlockId condition_block() {
    if (cur_ && blk(*cur_).statements.empty())
      return *cur_;
    BlockId b = new_block();
    if (cur_)
      jump_to(b);
    return b;
  }

  void lower_list(const std::vector<ast::Stmt> &list) {
    const int list_id = next_list_++;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (cur_ && !blk(*cur_).anchor)
        blk(*cur_).anchor = Anchor{list_id, static_cast<int>(i)};
      lower_stmt(list[i], list_id, static_cast<int>(i));
    }
    if (cur_ && !blk(*cur_).anchor)
      blk(*cur_).anchor = Anchor{list_id, static_cast<int>(list.size())};
  }

  void emit(Statement s, int list_id, int index) {
    BlockId b = open();
    if (!blk(b).anchor)
      blk(b).anchor = Anchor{list_id, index};
    blk(b).statements.push_back(std::move(s));
  }

  void lower_stmt(const ast::Stmt &s, int list_id, int index) {
    switch (s.kind) {
    case ast::StmtKind::Let:
      if (!s.has_init)
        return;
      [[fallthrough]];
    case ast::StmtKind::Assign: {
      Statement st = make_stmt(StmtKind::Assign, StmtOp::Store, s.line, s.value);
      st.slot = s.slot;
      emit(classify(std::move(st), StmtKind::Assign), list_id, index);
      return;
    }
    case ast::StmtKind::IndexAssign: {
      Statement st =
          make_stmt(StmtKind::ArrayWrite, StmtOp::IndexStore, s.line, s.value);
      st.array = s.target;
      st.index = s.index;
      emit(classify(std::move(st), StmtKind::ArrayWrite), list_id, index);
      return;
    }
    case ast::StmtKind::Print:
      emit(classify(make_stmt(StmtKind::Print, StmtOp::Print, s.line, s.value),
                    StmtKind::Print),
           list_id, index);
      return;
    case ast::StmtKind::Assert:
      emit(classify(make_stmt(StmtKind::Assert, StmtOp::Assert, s.line, s.value),
                    StmtKind::Assert),
           list_id, index);
      return;
    case ast::StmtKind::ExprStmt:
      emit(classify(make_stmt(StmtKind::Call, StmtOp::Eval, s.line, s.value),
                    StmtKind::Call),
           list_id, index);
      return;
    case ast::StmtKind::Return: {
      if (!s.value && src_.ret != TypeKind::Unit)
        throw Error(ErrorKind::Input,
                    src_.name + ": return without value at line " +
                        std::to_string(s.line));
      open();
      if (!blk(*cur_).anchor)
        blk(*cur_).anchor = Anchor{list_id, index};
      Terminator t;
      t.kind = TermKind::Return;
      t.stmt = classify(make_stmt(StmtKind::Return, StmtOp::Ret, s.line, s.value),
                        StmtKind::Return);
      close(std::move(t));
      return;
    }
    case ast::StmtKind::Halt: {
      open();
      if (!blk(*cur_).anchor)
        blk(*cur_).anchor = Anchor{list_id, index};
      Terminator t;
      t.kind = TermKind::Halt;
      t.stmt = make_stmt(StmtKind::Halt, StmtOp::Halt, s.line, nullptr);
      close(std::move(t));
      return;
    }
    case ast::StmtKind::If: {
      if (!s.value)
        throw Error(ErrorKind::Input, src_.name + ": if without condition at line " +
                                          std::to_string(s.line));
      BlockId cond = condition_block();
      if (!blk(cond).anchor)
        blk(cond).anchor = Anchor{list_id, index};
      BlockId then_entry = new_block();
      Terminator t;
      t.kind = TermKind::Branch;
      t.then_target = then_entry;
      t.stmt = classify(make_stmt(StmtKind::Condition, StmtOp::Cond, s.line, s.value),
                        StmtKind::Condition);
      blk(cond).term = std::move(t);

      std::vector<BlockId> fallthrough;
      cur_ = then_entry;
      lower_list(s.then_body);
      if (cur_)
        fallthrough.push_back(*cur_);

      bool else_to_join = !s.has_else;
      if (s.has_else) {
        BlockId else_entry = new_block();
        blk(cond).term.else_target = else_entry;
        cur_ = else_entry;
        lower_list(s.else_body);
        if (cur_)
          fallthrough.push_back(*cur_);
      }
      cur_.reset();
      if (!fallthrough.empty() || else_to_join) {
        BlockId join = new_block();
        for (BlockId b : fallthrough) {
          cur_ = b;
          jump_to(join);
        }
        if (else_to_join)
          blk(cond).term.else_target = join;
        cur_ = join;
      }
      return;
    }
    case ast::StmtKind::While: {
      if (!s.value)
        throw Error(ErrorKind::Input, src_.name +
                                          ": while without condition at line " +
                                          std::to_string(s.line));
      BlockId header = condition_block();
      if (!blk(header).anchor)
        blk(header).anchor = Anchor{list_id, index};
      BlockId body = new_block();
      Terminator t;
      t.kind = TermKind::Branch;
      t.then_target = body;
      t.stmt = classify(make_stmt(StmtKind::Condition, StmtOp::Cond, s.line, s.value),
                        StmtKind::Condition);
      blk(header).term = std::move(t);
      cur_ = body;
      lower_list(s.then_body);
      if (cur_)
        jump_to(header);
      BlockId exit = new_block();
      blk(header).term.else_target = exit;
      cur_ = exit;
      return;
    }
    }
    throw Error(ErrorKind::Input, src_.name + ": malformed statement at line " +
                                      std::to_string(s.line));
  }

  const ast::Function &src_;
  CfgBuildContext &ctx_;
  IRFunction fn_;
  std::optional<BlockId> cur_;
  int next_list_ = 0;
};

} // namespace

IRFunction build_cfg(const std::shared_ptr<const ast::Function> &fn,
                     CfgBuildContext &ctx) {
  if (!fn)
    throw Error(ErrorKind::Input, "build_cfg: null function body");
  if (fn->is_external) {
    IRFunction ext;
    ext.id = fn->name;
    ext.params = fn->params;
    ext.return_type = fn->ret;
    ext.is_external = true;
    ext.declared_error_return = fn->error_annotation;
    ext.source = fn;
    return ext;
  }
  return CfgBuilder(fn, ctx).build();
}

void mark_dead_blocks(IRFunction &fn) {
  std::vector<char> seen(fn.blocks.size(), 0);
  if (fn.blocks.empty())
    return;
  std::vector<BlockId> stack{fn.entry_block};
  seen[static_cast<std::size_t>(fn.entry_block)] = 1;
  while (!stack.empty()) {
    BlockId b = stack.back();
    stack.pop_back();
    for (BlockId s : fn.block(b).successors()) {
      if (s >= 0 && static_cast<std::size_t>(s) < seen.size() && !seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = 1;
        stack.push_back(s);
      }
    }
  }
  for (auto &b : fn.blocks)
    b.dead = !seen[static_cast<std::size_t>(b.id)];
}

void verify_function(const IRFunction &fn) {
  if (fn.is_external)
    return;
  const auto n = static_cast<BlockId>(fn.blocks.size());
  if (fn.entry_block < 0 || fn.entry_block >= n)
    throw_input(fn.id + ": entry block does not exist");
  for (const auto &b : fn.blocks) {
    auto succ = b.successors();
    for (BlockId s : succ)
      if (s < 0 || s >= n)
        throw_input(fn.id + ": block " + b.label + " has an edge to a missing block");
    if (b.is_conditional() != (succ.size() == 2))
      throw_input(fn.id + ": block " + b.label +
                  " violates conditional <=> out-degree 2");
    if (b.is_conditional() && succ[0] == succ[1])
      throw_input(fn.id + ": conditional block " + b.label +
                  " has identical successors");
  }
}

void verify_program(const IRProgram &p) {
  if (!p.find(p.entry))
    throw_input("entry function '" + p.entry + "' does not exist");
  std::set<StatementId> ids;
  auto check_id = [&](const FunctionId &fn, StatementId id) {
    if (!ids.insert(id).second)
      throw_input(fn + ": duplicate statement id " + std::to_string(id));
  };
  for (const auto &[name, fn] : p.functions) {
    verify_function(fn);
    for (const auto &b : fn.blocks) {
      for (const auto &s : b.statements) {
        check_id(name, s.id);
        for (const auto &c : s.calls)
          if (!c.via_reference && !p.find(c.callee))
            throw_analysis(name + ": call to undeclared function '" + c.callee +
                           "' at statement " + std::to_string(s.id));
      }
      if (b.term.stmt) {
        check_id(name, b.term.stmt->id);
        for (const auto &c : b.term.stmt->calls)
          if (!c.via_reference && !p.find(c.callee))
            throw_analysis(name + ": call to undeclared function '" + c.callee +
                           "' at statement " + std::to_string(b.term.stmt->id));
      }
    }
  }
}

} // namespace paver
