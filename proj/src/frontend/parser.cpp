#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "paver/error.hpp"
#include "paver/frontend.hpp"

namespace paver {

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(const SourceUnit &src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    const std::string &t = src_.text;
    while (pos_ < t.size()) {
      char c = t[pos_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < t.size() && t[pos_ + 1] == '/') {
        while (pos_ < t.size() && t[pos_] != '\n')
          advance();
        continue;
      }
      Token tok;
      tok.line = line_;
      tok.col = col_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Tok::Ident;
        while (pos_ < t.size() && (std::isalnum(static_cast<unsigned char>(t[pos_])) || t[pos_] == '_'))
          tok.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        tok.kind = Tok::Int;
        while (pos_ < t.size() && std::isdigit(static_cast<unsigned char>(t[pos_])))
          tok.text += advance();
      } else {
        tok.kind = Tok::Punct;
        static const char *two[] = {"->", "==", "!=", "<=", ">=", "&&", "||"};
        bool matched = false;
        for (const char *op : two) {
          if (t.compare(pos_, 2, op) == 0) {
            tok.text = op;
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string singles = "(){}[];,:=+-*/%<>!&@";
          if (singles.find(c) == std::string::npos)
            throw ParseError(src_.path, line_, col_,
                             std::string("unexpected character '") + c + "'");
          tok.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Tok::End;
    end.line = last_line();
    end.col = 1;
    out.push_back(end);
    return out;
  }

private:
  char advance() {
    char c = src_.text[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  // Line of the final character, so errors at end of input name the last
  // line rather than the phantom one after a trailing newline.
  int last_line() const {
    const std::string &t = src_.text;
    int lines = 1;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      if (t[i] == '\n')
        ++lines;
    return lines;
  }

  const SourceUnit &src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string> kKeywords = {
    "fn",   "extern", "let",  "if",    "else", "while", "return", "print",
    "assert", "halt", "true", "false", "nil",  "alloc", "len",    "read",
    "int",  "bool",   "ref",  "unit"};

// Recursive-descent parser with an integrated resolver/type checker.
class Parser {
public:
  Parser(const SourceUnit &src, std::vector<Token> toks)
      : src_(src), toks_(std::move(toks)) {}

  ast::Program run() {
    // First pass: collect signatures so calls may precede definitions.
    collect_signatures();
    pos_ = 0;
    ast::Program prog;
    prog.file = src_.path;
    while (peek().kind != Tok::End)
      prog.functions.push_back(function());
    return prog;
  }

private:
  struct Sig {
    std::vector<ValueType> params;
    TypeKind ret = TypeKind::Unit;
  };

  const Token &peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at(const char *text) const {
    return (peek().kind == Tok::Punct || peek().kind == Tok::Ident) &&
           peek().text == text;
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  bool accept(const char *text) {
    if (at(text)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const Token &t, const std::string &msg) const {
    throw ParseError(src_.path, t.line, t.col, msg);
  }
  Token expect(const char *text) {
    if (!at(text)) {
      const Token &t = peek();
      fail(t, std::string("expected '") + text + "' but found " +
                  (t.kind == Tok::End ? std::string("end of input")
                                      : "'" + t.text + "'"));
    }
    return next();
  }
  std::string ident() {
    const Token &t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text))
      fail(t, "expected identifier but found " +
                  (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
    return next().text;
  }

  TypeKind base_type() {
    const Token t = next();
    if (t.text == "int") return TypeKind::Int;
    if (t.text == "bool") return TypeKind::Bool;
    if (t.text == "ref") return TypeKind::Ref;
    if (t.text == "unit") return TypeKind::Unit;
    fail(t, "expected a type but found '" + t.text + "'");
  }

  ValueType type() {
    if (accept("fn")) {
      expect("(");
      std::vector<TypeKind> params;
      if (!at(")")) {
        do {
          params.push_back(base_type());
        } while (accept(","));
      }
      expect(")");
      expect("->");
      return ValueType::fn(std::move(params), base_type());
    }
    return ValueType::of(base_type());
  }

  void skip_block() {
    expect("{");
    int depth = 1;
    while (depth > 0) {
      const Token t = next();
      if (t.kind == Tok::End)
        fail(t, "unterminated block");
      if (t.kind == Tok::Punct && t.text == "{")
        ++depth;
      else if (t.kind == Tok::Punct && t.text == "}")
        --depth;
    }
  }

  std::optional<Constant> error_annotation(TypeKind ret) {
    if (!accept("@"))
      return std::nullopt;
    const Token kw = peek();
    if (ident() != "error")
      fail(kw, "unknown annotation");
    expect("(");
    const Token t = peek();
    Constant c;
    if (accept("true")) c = Constant::boolean(true);
    else if (accept("false")) c = Constant::boolean(false);
    else if (accept("nil")) c = Constant::nil();
    else {
      bool neg = accept("-");
      if (peek().kind != Tok::Int)
        fail(peek(), "expected a constant in @error");
      c = Constant::integer(int_literal(next(), neg));
    }
    expect(")");
    if (c.type != ret)
      fail(t, "type mismatch: @error constant is " + to_string(c.type) +
                  " but function returns " + to_string(ret));
    return c;
  }

  std::int64_t int_literal(const Token &t, bool negative) {
    std::string digits = (negative ? "-" : "") + t.text;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || p != digits.data() + digits.size())
      fail(t, "integer literal out of range: " + digits);
    return v;
  }

  void signature_header(std::string &name, std::vector<ast::Param> &params,
                        TypeKind &ret, Token &name_tok) {
    name_tok = peek();
    name = ident();
    expect("(");
    std::set<std::string> seen;
    if (!at(")")) {
      do {
        const Token pt = peek();
        ast::Param p;
        p.name = ident();
        expect(":");
        p.type = type();
        if (p.type.kind == TypeKind::Unit)
          fail(pt, "parameter '" + p.name + "' cannot have type unit");
        if (!seen.insert(p.name).second)
          fail(pt, "duplicate parameter '" + p.name + "'");
        params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    ret = TypeKind::Unit;
    if (accept("->")) {
      const Token rt = peek();
      ValueType r = type();
      if (r.is_fn())
        fail(rt, "functions cannot return function references");
      ret = r.kind;
    }
  }

  void collect_signatures() {
    while (peek().kind != Tok::End) {
      bool external = accept("extern");
      expect("fn");
      std::string name;
      std::vector<ast::Param> params;
      TypeKind ret;
      Token name_tok;
      signature_header(name, params, ret, name_tok);
      error_annotation(ret);
      if (external)
        expect(";");
      else
        skip_block();
      if (sigs_.count(name))
        fail(name_tok, "duplicate function '" + name + "'");
      Sig s;
      for (auto &p : params)
        s.params.push_back(p.type);
      s.ret = ret;
      sigs_[name] = std::move(s);
    }
  }

  std::shared_ptr<const ast::Function> function() {
    auto fn = std::make_shared<ast::Function>();
    fn->is_external = accept("extern");
    fn->line = expect("fn").line;
    Token name_tok;
    signature_header(fn->name, fn->params, fn->ret, name_tok);
    fn->error_annotation = error_annotation(fn->ret);
    if (fn->is_external) {
      fn->end_line = expect(";").line;
      return fn;
    }
    cur_ = fn.get();
    slots_.clear();
    for (const auto &p : fn->params) {
      slots_[p.name] = static_cast<int>(fn->locals.size());
      fn->locals.push_back(p);
    }
    fn->body = block(&fn->end_line);
    cur_ = nullptr;
    return fn;
  }

  std::vector<ast::Stmt> block(int *end_line = nullptr) {
    expect("{");
    std::vector<ast::Stmt> out;
    while (!at("}")) {
      if (peek().kind == Tok::End)
        fail(peek(), "unterminated block: expected '}'");
      out.push_back(statement());
    }
    const Token close = expect("}");
    if (end_line)
      *end_line = close.line;
    return out;
  }

  void require(const Token &t, const ValueType &have, const ValueType &want,
               const std::string &what) {
    if (!(have == want))
      fail(t, "type mismatch: " + what + " expects " + to_string(want) +
                  " but got " + to_string(have));
  }

  int declare(const Token &t, const std::string &name, const ValueType &ty) {
    if (sigs_.count(name))
      fail(t, "'" + name + "' is a function name");
    auto it = slots_.find(name);
    if (it != slots_.end()) {
      const auto &existing = cur_->locals[static_cast<std::size_t>(it->second)].type;
      if (!(existing == ty))
        fail(t, "'" + name + "' redeclared with type " + to_string(ty) +
                    " (was " + to_string(existing) + ")");
      return it->second;
    }
    int slot = static_cast<int>(cur_->locals.size());
    cur_->locals.push_back({name, ty});
    slots_[name] = slot;
    return slot;
  }

  ast::Stmt statement() {
    const Token t = peek();
    ast::Stmt s;
    s.line = t.line;
    if (accept("let")) {
      s.kind = ast::StmtKind::Let;
      const Token nt = peek();
      s.name = ident();
      if (accept(":")) {
        s.has_type = true;
        s.declared = type();
        if (s.declared.kind == TypeKind::Unit)
          fail(nt, "variables cannot have type unit");
      }
      if (accept("=")) {
        s.value = expr();
        if (s.has_type)
          require(nt, s.value->type, s.declared, "initializer of '" + s.name + "'");
        else
          s.declared = s.value->type;
        if (s.declared.kind == TypeKind::Unit)
          fail(nt, "cannot bind a unit value to '" + s.name + "'");
      } else {
        if (!s.has_type)
          fail(nt, "declaration of '" + s.name + "' needs a type or initializer");
        s.has_init = false;
      }
      expect(";");
      s.slot = declare(nt, s.name, s.declared);
      return s;
    }
    if (accept("if")) {
      s.kind = ast::StmtKind::If;
      s.value = condition(t);
      s.then_body = block();
      if (accept("else")) {
        s.has_else = true;
        if (at("if"))
          s.else_body.push_back(statement());
        else
          s.else_body = block();
      }
      return s;
    }
    if (accept("while")) {
      s.kind = ast::StmtKind::While;
      s.value = condition(t);
      s.then_body = block();
      return s;
    }
    if (accept("return")) {
      s.kind = ast::StmtKind::Return;
      if (!at(";")) {
        s.value = expr();
        require(t, s.value->type, ValueType::of(cur_->ret), "return value");
      } else if (cur_->ret != TypeKind::Unit) {
        fail(t, "type mismatch: return without a value in function returning " +
                    to_string(cur_->ret));
      }
      expect(";");
      return s;
    }
    if (accept("print")) {
      s.kind = ast::StmtKind::Print;
      expect("(");
      s.value = expr();
      if (s.value->type.kind != TypeKind::Int && s.value->type.kind != TypeKind::Bool)
        fail(t, "type mismatch: print expects int or bool");
      expect(")");
      expect(";");
      return s;
    }
    if (accept("assert")) {
      s.kind = ast::StmtKind::Assert;
      expect("(");
      s.value = expr();
      require(t, s.value->type, ValueType::of(TypeKind::Bool), "assert");
      expect(")");
      expect(";");
      return s;
    }
    if (accept("halt")) {
      s.kind = ast::StmtKind::Halt;
      expect(";");
      return s;
    }

    ast::ExprPtr lhs = expr();
    if (accept("=")) {
      ast::ExprPtr rhs = expr();
      if (lhs->kind == ast::ExprKind::Var) {
        s.kind = ast::StmtKind::Assign;
        s.name = lhs->name;
        s.slot = lhs->slot;
        require(t, rhs->type, lhs->type, "assignment to '" + s.name + "'");
      } else if (lhs->kind == ast::ExprKind::Index) {
        s.kind = ast::StmtKind::IndexAssign;
        s.target = lhs->args[0];
        s.index = lhs->args[1];
        require(t, rhs->type, ValueType::of(TypeKind::Int), "array element store");
      } else {
        fail(t, "left side of '=' must be a variable or array element");
      }
      s.value = rhs;
      expect(";");
      return s;
    }
    if (lhs->kind != ast::ExprKind::Call)
      fail(t, "expression statement must be a call");
    s.kind = ast::StmtKind::ExprStmt;
    s.value = lhs;
    expect(";");
    return s;
  }

  ast::ExprPtr condition(const Token &t) {
    expect("(");
    ast::ExprPtr c = expr();
    require(t, c->type, ValueType::of(TypeKind::Bool), "condition");
    expect(")");
    return c;
  }

  static ast::ExprPtr make(ast::ExprKind kind, int line) {
    auto e = std::make_shared<ast::Expr>();
    e->kind = kind;
    e->line = line;
    return e;
  }

  ast::ExprPtr expr() { return binary(0); }

  static int precedence(const std::string &op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
  }

  ast::ExprPtr binary(int min_prec) {
    ast::ExprPtr lhs = unary();
    while (peek().kind == Tok::Punct) {
      const Token op = peek();
      int prec = precedence(op.text);
      if (prec < 0 || prec < min_prec)
        break;
      next();
      ast::ExprPtr rhs = binary(prec + 1);
      auto e = make(ast::ExprKind::Binary, op.line);
      e->op = op.text;
      e->args = {lhs, rhs};
      check_binary(op, *e);
      lhs = e;
    }
    return lhs;
  }

  void check_binary(const Token &op, ast::Expr &e) {
    const auto &l = e.args[0]->type;
    const auto &r = e.args[1]->type;
    const auto I = ValueType::of(TypeKind::Int);
    const auto B = ValueType::of(TypeKind::Bool);
    const std::string &o = e.op;
    if (o == "&&" || o == "||") {
      require(op, l, B, "'" + o + "'");
      require(op, r, B, "'" + o + "'");
      e.type = B;
    } else if (o == "==" || o == "!=") {
      if (!(l == r) || l.kind == TypeKind::Unit)
        fail(op, "type mismatch: cannot compare " + to_string(l) + " with " +
                     to_string(r));
      e.type = B;
    } else if (o == "<" || o == "<=" || o == ">" || o == ">=") {
      require(op, l, I, "'" + o + "'");
      require(op, r, I, "'" + o + "'");
      e.type = B;
    } else {
      require(op, l, I, "'" + o + "'");
      require(op, r, I, "'" + o + "'");
      e.type = I;
    }
  }

  ast::ExprPtr unary() {
    const Token t = peek();
    if (accept("-")) {
      if (peek().kind == Tok::Int) {
        auto e = make(ast::ExprKind::IntLit, t.line);
        e->int_value = int_literal(next(), true);
        e->type = ValueType::of(TypeKind::Int);
        return e;
      }
      auto operand = unary();
      require(t, operand->type, ValueType::of(TypeKind::Int), "unary '-'");
      auto e = make(ast::ExprKind::Unary, t.line);
      e->op = "-";
      e->args = {operand};
      e->type = ValueType::of(TypeKind::Int);
      return e;
    }
    if (accept("!")) {
      auto operand = unary();
      require(t, operand->type, ValueType::of(TypeKind::Bool), "'!'");
      auto e = make(ast::ExprKind::Unary, t.line);
      e->op = "!";
      e->args = {operand};
      e->type = ValueType::of(TypeKind::Bool);
      return e;
    }
    return postfix(primary());
  }

  ast::ExprPtr postfix(ast::ExprPtr e) {
    while (at("[")) {
      const Token t = next();
      auto idx = expr();
      expect("]");
      require(t, e->type, ValueType::of(TypeKind::Ref), "indexing");
      require(t, idx->type, ValueType::of(TypeKind::Int), "array index");
      auto ix = make(ast::ExprKind::Index, t.line);
      ix->args = {e, idx};
      ix->type = ValueType::of(TypeKind::Int);
      e = ix;
    }
    return e;
  }

  std::vector<ast::ExprPtr> call_args() {
    expect("(");
    std::vector<ast::ExprPtr> args;
    if (!at(")")) {
      do {
        args.push_back(expr());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  ast::ExprPtr primary() {
    const Token t = peek();
    if (t.kind == Tok::Int) {
      next();
      auto e = make(ast::ExprKind::IntLit, t.line);
      e->int_value = int_literal(t, false);
      e->type = ValueType::of(TypeKind::Int);
      return e;
    }
    if (accept("true") || accept("false")) {
      auto e = make(ast::ExprKind::BoolLit, t.line);
      e->bool_value = t.text == "true";
      e->type = ValueType::of(TypeKind::Bool);
      return e;
    }
    if (accept("nil")) {
      auto e = make(ast::ExprKind::Nil, t.line);
      e->type = ValueType::of(TypeKind::Ref);
      return e;
    }
    if (accept("(")) {
      auto e = expr();
      expect(")");
      return e;
    }
    if (accept("&")) {
      const Token nt = peek();
      std::string name = ident();
      auto it = sigs_.find(name);
      if (it == sigs_.end())
        fail(nt, "reference to undeclared function '" + name + "'");
      std::vector<TypeKind> kinds;
      for (const auto &p : it->second.params) {
        if (p.is_fn())
          fail(nt, "cannot take a reference to higher-order function '" + name + "'");
        kinds.push_back(p.kind);
      }
      auto e = make(ast::ExprKind::FnRef, t.line);
      e->name = name;
      e->type = ValueType::fn(std::move(kinds), it->second.ret);
      return e;
    }
    if (accept("alloc")) {
      auto args = call_args();
      if (args.size() != 1)
        fail(t, "alloc takes one argument");
      require(t, args[0]->type, ValueType::of(TypeKind::Int), "alloc size");
      auto e = make(ast::ExprKind::Alloc, t.line);
      e->args = std::move(args);
      e->type = ValueType::of(TypeKind::Ref);
      return e;
    }
    if (accept("len")) {
      auto args = call_args();
      if (args.size() != 1)
        fail(t, "len takes one argument");
      require(t, args[0]->type, ValueType::of(TypeKind::Ref), "len");
      auto e = make(ast::ExprKind::Len, t.line);
      e->args = std::move(args);
      e->type = ValueType::of(TypeKind::Int);
      return e;
    }
    if (accept("read")) {
      auto args = call_args();
      if (!args.empty())
        fail(t, "read takes no arguments");
      auto e = make(ast::ExprKind::Read, t.line);
      e->type = ValueType::of(TypeKind::Int);
      return e;
    }
    std::string name = ident();
    if (at("(")) {
      auto args = call_args();
      auto e = make(ast::ExprKind::Call, t.line);
      e->name = name;
      e->args = std::move(args);
      std::vector<ValueType> params;
      TypeKind ret;
      if (auto ls = slots_.find(name); ls != slots_.end()) {
        const ValueType &vt = cur_->locals[static_cast<std::size_t>(ls->second)].type;
        if (!vt.is_fn())
          fail(t, "'" + name + "' is not callable");
        e->via_reference = true;
        e->slot = ls->second;
        for (auto k : vt.params)
          params.push_back(ValueType::of(k));
        ret = vt.ret;
      } else if (auto fs = sigs_.find(name); fs != sigs_.end()) {
        params = fs->second.params;
        ret = fs->second.ret;
      } else {
        fail(t, "call to undeclared name '" + name + "'");
      }
      if (params.size() != e->args.size())
        fail(t, "'" + name + "' expects " + std::to_string(params.size()) +
                    " argument(s), got " + std::to_string(e->args.size()));
      for (std::size_t i = 0; i < params.size(); ++i)
        require(t, e->args[i]->type, params[i],
                "argument " + std::to_string(i + 1) + " of '" + name + "'");
      e->type = ValueType::of(ret);
      return postfix(e);
    }
    auto ls = slots_.find(name);
    if (ls == slots_.end())
      fail(t, "use of undeclared variable '" + name + "'");
    auto e = make(ast::ExprKind::Var, t.line);
    e->name = name;
    e->slot = ls->second;
    e->type = cur_->locals[static_cast<std::size_t>(ls->second)].type;
    return e;
  }

  const SourceUnit &src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Sig> sigs_;
  ast::Function *cur_ = nullptr;
  std::map<std::string, int> slots_;
};

} // namespace

SourceUnit load_source(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_input("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceUnit{path, ss.str()};
}

ast::Program parse(const SourceUnit &src) {
  Lexer lexer(src);
  Parser parser(src, lexer.run());
  return parser.run();
}

ValueType ast::Function::signature() const {
  std::vector<TypeKind> kinds;
  for (const auto &p : params)
    kinds.push_back(p.type.kind);
  return ValueType::fn(std::move(kinds), ret);
}

const ast::Function *ast::Program::find(const std::string &name) const {
  for (const auto &f : functions)
    if (f->name == name)
      return f.get();
  return nullptr;
}

} // namespace paver
