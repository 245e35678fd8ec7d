#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "paver/error.hpp"
#include "paver/frontend.hpp"

namespace paver {

namespace {

void collect_refs(const ast::Expr &e, std::set<std::string> &out) {
  if (e.kind == ast::ExprKind::FnRef)
    out.insert(e.name);
  for (const auto &a : e.args)
    if (a)
      collect_refs(*a, out);
}

void collect_refs(const std::vector<ast::Stmt> &list, std::set<std::string> &out) {
  for (const auto &s : list) {
    for (const auto *e : {s.target.get(), s.index.get(), s.value.get()})
      if (e)
        collect_refs(*e, out);
    collect_refs(s.then_body, out);
    collect_refs(s.else_body, out);
  }
}

} // namespace

IRProgram lower(const ast::Program &tree) {
  if (!tree.find("main"))
    throw Error(ErrorKind::Input, tree.file + ": program has no 'main' function");

  IRProgram p;
  p.file = tree.file;
  p.entry = "main";
  p.executable = true;

  CfgBuildContext ctx;
  ctx.file = tree.file;
  ctx.source_map = &p.source_map;

  std::set<std::string> taken;
  for (const auto &fn : tree.functions) {
    collect_refs(fn->body, taken);
    p.functions.emplace(fn->name, build_cfg(fn, ctx));
  }
  for (const auto &name : taken)
    p.functions.at(name).address_taken = true;
  if (p.functions.at("main").is_external)
    throw Error(ErrorKind::Input, tree.file + ": 'main' must have a body");
  verify_program(p);
  return p;
}

IRProgram compile(const SourceUnit &src) { return lower(parse(src)); }

namespace {

bool needs_parens(const ast::Expr &e) {
  return e.kind == ast::ExprKind::Binary || e.kind == ast::ExprKind::Unary ||
         (e.kind == ast::ExprKind::IntLit && e.int_value < 0);
}

std::string operand(const ast::Expr &e) {
  std::string s = to_source(e);
  return needs_parens(e) ? "(" + s + ")" : s;
}

std::string join_args(const std::vector<ast::ExprPtr> &args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i)
      s += ", ";
    s += to_source(*args[i]);
  }
  return s;
}

std::string type_source(const ValueType &t) {
  if (!t.is_fn())
    return to_string(t.kind);
  std::string s = "fn(";
  for (std::size_t i = 0; i < t.params.size(); ++i) {
    if (i)
      s += ", ";
    s += to_string(t.params[i]);
  }
  return s + ") -> " + to_string(t.ret);
}

class Printer {
public:
  explicit Printer(const IRFunction &fn) : fn_(fn), src_(*fn.source) {
    for (const auto &patch : fn.patches) {
      const auto &b = fn.block(patch.block);
      if (!b.anchor)
        throw Error(ErrorKind::Internal,
                    fn.id + ": patched block " + b.label + " has no source anchor");
      patches_[{b.anchor->list, b.anchor->index}] = patch.value;
    }
  }

  void print(std::ostringstream &out) {
    out << "fn " << src_.name << "(";
    for (std::size_t i = 0; i < src_.params.size(); ++i) {
      if (i)
        out << ", ";
      out << src_.params[i].name << ": " << type_source(src_.params[i].type);
    }
    out << ")";
    if (src_.ret != TypeKind::Unit)
      out << " -> " << to_string(src_.ret);
    if (src_.error_annotation)
      out << " @error(" << to_source(*src_.error_annotation) << ")";
    if (src_.body.empty() && patches_.empty()) {
      out << " {}\n";
      return;
    }
    out << " {\n";
    list(out, src_.body, 1);
    out << "}\n";
  }

private:
  static void indent(std::ostringstream &out, int depth) {
    for (int i = 0; i < depth; ++i)
      out << "  ";
  }

  static std::string ret_line(const Constant &c) {
    std::string v = to_source(c);
    return v.empty() ? "return;" : "return " + v + ";";
  }

  // Statements following an inserted return are dropped; their variable
  // declarations survive (as declarations only) so later uses still resolve.
  void declarations_only(std::ostringstream &out, const std::vector<ast::Stmt> &list,
                         std::size_t from, int depth, bool consume_lists) {
    for (std::size_t i = from; i < list.size(); ++i) {
      const auto &s = list[i];
      if (s.kind == ast::StmtKind::Let) {
        indent(out, depth);
        out << "let " << s.name << ": " << type_source(s.declared) << ";\n";
      }
      if (consume_lists && (s.kind == ast::StmtKind::If || s.kind == ast::StmtKind::While)) {
        skip_list(out, s.then_body, depth);
        if (s.kind == ast::StmtKind::If && s.has_else)
          skip_list(out, s.else_body, depth);
      }
    }
  }

  void skip_list(std::ostringstream &out, const std::vector<ast::Stmt> &list, int depth) {
    ++next_list_;
    declarations_only(out, list, 0, depth, true);
  }

  void list(std::ostringstream &out, const std::vector<ast::Stmt> &list, int depth) {
    const int id = next_list_++;
    for (std::size_t i = 0; i <= list.size(); ++i) {
      auto it = patches_.find({id, static_cast<int>(i)});
      if (it != patches_.end()) {
        indent(out, depth);
        out << ret_line(it->second) << "\n";
        declarations_only(out, list, i, depth, true);
        return;
      }
      if (i < list.size())
        stmt(out, list[i], depth);
    }
  }

  void stmt(std::ostringstream &out, const ast::Stmt &s, int depth) {
    indent(out, depth);
    switch (s.kind) {
    case ast::StmtKind::Let:
      out << "let " << s.name;
      if (s.has_type)
        out << ": " << type_source(s.declared);
      if (s.has_init)
        out << " = " << to_source(*s.value);
      out << ";\n";
      return;
    case ast::StmtKind::Assign:
      out << s.name << " = " << to_source(*s.value) << ";\n";
      return;
    case ast::StmtKind::IndexAssign:
      out << operand(*s.target) << "[" << to_source(*s.index)
          << "] = " << to_source(*s.value) << ";\n";
      return;
    case ast::StmtKind::Print:
      out << "print(" << to_source(*s.value) << ");\n";
      return;
    case ast::StmtKind::Assert:
      out << "assert(" << to_source(*s.value) << ");\n";
      return;
    case ast::StmtKind::ExprStmt:
      out << to_source(*s.value) << ";\n";
      return;
    case ast::StmtKind::Halt:
      out << "halt;\n";
      return;
    case ast::StmtKind::Return:
      if (s.value)
        out << "return " << to_source(*s.value) << ";\n";
      else
        out << "return;\n";
      return;
    case ast::StmtKind::While:
      out << "while (" << to_source(*s.value) << ") {\n";
      list(out, s.then_body, depth + 1);
      indent(out, depth);
      out << "}\n";
      return;
    case ast::StmtKind::If:
      out << "if (" << to_source(*s.value) << ") {\n";
      list(out, s.then_body, depth + 1);
      indent(out, depth);
      out << "}";
      if (s.has_else) {
        out << " else {\n";
        list(out, s.else_body, depth + 1);
        indent(out, depth);
        out << "}";
      }
      out << "\n";
      return;
    }
  }

  const IRFunction &fn_;
  const ast::Function &src_;
  std::map<std::pair<int, int>, Constant> patches_;
  int next_list_ = 0;
};

} // namespace

std::string to_source(const ast::Expr &e) {
  switch (e.kind) {
  case ast::ExprKind::IntLit: return std::to_string(e.int_value);
  case ast::ExprKind::BoolLit: return e.bool_value ? "true" : "false";
  case ast::ExprKind::Nil: return "nil";
  case ast::ExprKind::Var: return e.name;
  case ast::ExprKind::FnRef: return "&" + e.name;
  case ast::ExprKind::Unary: return e.op + operand(*e.args[0]);
  case ast::ExprKind::Binary:
    return operand(*e.args[0]) + " " + e.op + " " + operand(*e.args[1]);
  case ast::ExprKind::Index:
    return operand(*e.args[0]) + "[" + to_source(*e.args[1]) + "]";
  case ast::ExprKind::Call: return e.name + "(" + join_args(e.args) + ")";
  case ast::ExprKind::Alloc: return "alloc(" + to_source(*e.args[0]) + ")";
  case ast::ExprKind::Len: return "len(" + to_source(*e.args[0]) + ")";
  case ast::ExprKind::Read: return "read()";
  }
  return "";
}

SourceUnit pretty_print(const IRProgram &p) {
  if (!p.executable)
    throw Error(ErrorKind::Usage,
                "pretty_print: graph-imported programs have no statement bodies "
                "(unsupported representation)");
  std::ostringstream out;
  bool first = true;
  // Preserve the original declaration order so output diffs cleanly.
  std::vector<const IRFunction *> order;
  for (const auto &[name, fn] : p.functions)
    order.push_back(&fn);
  std::stable_sort(order.begin(), order.end(), [](const IRFunction *a, const IRFunction *b) {
    return a->source->line < b->source->line;
  });
  for (const IRFunction *fn : order) {
    if (!fn->source)
      throw Error(ErrorKind::Usage, "pretty_print: function '" + fn->id +
                                        "' has no source representation");
    if (!first)
      out << "\n";
    first = false;
    if (fn->is_external) {
      const auto &src = *fn->source;
      out << "extern fn " << src.name << "(";
      for (std::size_t i = 0; i < src.params.size(); ++i) {
        if (i)
          out << ", ";
        out << src.params[i].name << ": " << type_source(src.params[i].type);
      }
      out << ")";
      if (src.ret != TypeKind::Unit)
        out << " -> " << to_string(src.ret);
      if (src.error_annotation)
        out << " @error(" << to_source(*src.error_annotation) << ")";
      out << ";\n";
      continue;
    }
    Printer(*fn).print(out);
  }
  return SourceUnit{p.file, out.str()};
}

} // namespace paver
