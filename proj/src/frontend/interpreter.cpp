#include "paver/interpreter.hpp"

#include <limits>
#include <map>

#include "paver/error.hpp"

namespace paver {

std::string to_string(FaultKind kind) {
  switch (kind) {
  case FaultKind::Oob: return "oob";
  case FaultKind::DivZero: return "div_zero";
  case FaultKind::NilDeref: return "nil_deref";
  case FaultKind::AssertFail: return "assert_fail";
  case FaultKind::Resource: return "resource";
  }
  return "?";
}

std::optional<FaultKind> parse_fault_kind(const std::string &text) {
  for (auto k : {FaultKind::Oob, FaultKind::DivZero, FaultKind::NilDeref,
                 FaultKind::AssertFail, FaultKind::Resource})
    if (to_string(k) == text)
      return k;
  return std::nullopt;
}

std::string to_string(ExecutionResult::Status status) {
  switch (status) {
  case ExecutionResult::Status::Ok: return "ok";
  case ExecutionResult::Status::Fault: return "fault";
  case ExecutionResult::Status::Timeout: return "timeout";
  case ExecutionResult::Status::InputExhausted: return "input_exhausted";
  }
  return "?";
}

namespace {

struct Value {
  TypeKind kind = TypeKind::Unit;
  std::int64_t v = 0;
};

constexpr std::int64_t kNil = -1;

Value default_value(TypeKind k) {
  if (k == TypeKind::Ref || k == TypeKind::Fn)
    return {k, kNil};
  return {k, 0};
}

struct Stop {}; // unwinds the interpreter once `result_.status` is final

class Machine {
public:
  Machine(const IRProgram &p, const std::vector<std::int64_t> &input,
          const ExecutionLimits &limits, bool trace)
      : p_(p), input_(input), limits_(limits), tracing_(trace) {
    for (const auto &[name, fn] : p.functions) {
      index_[name] = static_cast<std::int64_t>(fns_.size());
      fns_.push_back(&fn);
    }
  }

  ExecutionResult run() {
    try {
      const IRFunction &main = p_.function(p_.entry);
      std::vector<Value> args;
      for (const auto &param : main.params)
        args.push_back(default_value(param.type.kind));
      Value v = call(main, std::move(args), 0);
      result_.status = ExecutionResult::Status::Ok;
      result_.exit_value = v.v;
    } catch (const Stop &) {
    }
    return std::move(result_);
  }

private:
  [[noreturn]] void fault(FaultKind k) {
    result_.status = ExecutionResult::Status::Fault;
    result_.fault = k;
    result_.fault_at = cur_stmt_;
    throw Stop{};
  }

  void step() {
    if (++result_.steps > limits_.max_steps) {
      result_.status = ExecutionResult::Status::Timeout;
      throw Stop{};
    }
  }

  Value call(const IRFunction &fn, std::vector<Value> args, int depth) {
    if (depth > limits_.max_call_depth)
      fault(FaultKind::Resource);
    if (fn.is_external)
      return default_value(fn.return_type);

    std::vector<Value> locals(static_cast<std::size_t>(fn.num_slots));
    if (fn.source) {
      for (std::size_t i = 0; i < locals.size(); ++i)
        locals[i] = default_value(fn.source->locals[i].type.kind);
    }
    for (std::size_t i = 0; i < args.size() && i < locals.size(); ++i)
      locals[i] = args[i];

    BlockId b = fn.entry_block;
    for (;;) {
      const BasicBlock &blk = fn.block(b);
      if (tracing_)
        result_.trace.push_back({fn.id, b});
      for (const Statement &s : blk.statements)
        exec(s, locals, depth);

      const Terminator &t = blk.term;
      step();
      if (t.stmt)
        cur_stmt_ = t.stmt->id;
      switch (t.kind) {
      case TermKind::Jump:
        b = t.then_target;
        break;
      case TermKind::Branch: {
        Value c = eval(*t.stmt->value, locals, depth);
        b = c.v ? t.then_target : t.else_target;
        break;
      }
      case TermKind::Return:
        if (t.stmt && t.stmt->value)
          return eval(*t.stmt->value, locals, depth);
        return default_value(fn.return_type);
      case TermKind::Halt:
        result_.status = ExecutionResult::Status::Ok;
        result_.exit_value = 0;
        throw Stop{};
      }
    }
  }

  void exec(const Statement &s, std::vector<Value> &locals, int depth) {
    step();
    cur_stmt_ = s.id;
    switch (s.op) {
    case StmtOp::Nop:
      return;
    case StmtOp::Store:
      locals[static_cast<std::size_t>(s.slot)] = eval(*s.value, locals, depth);
      return;
    case StmtOp::IndexStore: {
      Value arr = eval(*s.array, locals, depth);
      Value idx = eval(*s.index, locals, depth);
      Value val = eval(*s.value, locals, depth);
      cell(arr, idx) = val.v;
      return;
    }
    case StmtOp::Print:
      result_.output.push_back(eval(*s.value, locals, depth).v);
      return;
    case StmtOp::Assert:
      if (!eval(*s.value, locals, depth).v)
        fault(FaultKind::AssertFail);
      return;
    case StmtOp::Eval:
      eval(*s.value, locals, depth);
      return;
    default:
      throw Error(ErrorKind::Internal, "terminator statement in block body");
    }
  }

  std::int64_t &cell(const Value &arr, const Value &idx) {
    if (arr.v == kNil)
      fault(FaultKind::NilDeref);
    auto &a = heap_[static_cast<std::size_t>(arr.v)];
    if (idx.v < 0 || idx.v >= static_cast<std::int64_t>(a.size()))
      fault(FaultKind::Oob);
    return a[static_cast<std::size_t>(idx.v)];
  }

  static std::int64_t wrap(std::uint64_t x) { return static_cast<std::int64_t>(x); }

  Value eval(const ast::Expr &e, std::vector<Value> &locals, int depth) {
    using K = ast::ExprKind;
    switch (e.kind) {
    case K::IntLit: return {TypeKind::Int, e.int_value};
    case K::BoolLit: return {TypeKind::Bool, e.bool_value ? 1 : 0};
    case K::Nil: return {TypeKind::Ref, kNil};
    case K::Var: return locals[static_cast<std::size_t>(e.slot)];
    case K::FnRef: return {TypeKind::Fn, index_.at(e.name)};
    case K::Unary: {
      Value a = eval(*e.args[0], locals, depth);
      if (e.op == "-")
        return {TypeKind::Int, wrap(0 - static_cast<std::uint64_t>(a.v))};
      return {TypeKind::Bool, a.v ? 0 : 1};
    }
    case K::Binary: return binary(e, locals, depth);
    case K::Index: {
      Value arr = eval(*e.args[0], locals, depth);
      Value idx = eval(*e.args[1], locals, depth);
      return {TypeKind::Int, cell(arr, idx)};
    }
    case K::Alloc: {
      Value n = eval(*e.args[0], locals, depth);
      if (n.v < 0)
        fault(FaultKind::Oob);
      if (heap_cells_ + n.v > limits_.max_heap_cells)
        fault(FaultKind::Resource);
      heap_cells_ += n.v;
      heap_.emplace_back(static_cast<std::size_t>(n.v), 0);
      return {TypeKind::Ref, static_cast<std::int64_t>(heap_.size() - 1)};
    }
    case K::Len: {
      Value arr = eval(*e.args[0], locals, depth);
      if (arr.v == kNil)
        fault(FaultKind::NilDeref);
      return {TypeKind::Int,
              static_cast<std::int64_t>(heap_[static_cast<std::size_t>(arr.v)].size())};
    }
    case K::Read: {
      if (input_pos_ >= input_.size()) {
        result_.status = ExecutionResult::Status::InputExhausted;
        throw Stop{};
      }
      return {TypeKind::Int, input_[input_pos_++]};
    }
    case K::Call: {
      const IRFunction *target = nullptr;
      if (e.via_reference) {
        Value f = locals[static_cast<std::size_t>(e.slot)];
        if (f.v == kNil)
          fault(FaultKind::NilDeref);
        target = fns_[static_cast<std::size_t>(f.v)];
      } else {
        target = &p_.function(e.name);
      }
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto &a : e.args)
        args.push_back(eval(*a, locals, depth));
      const StatementId saved = cur_stmt_;
      Value v = call(*target, std::move(args), depth + 1);
      cur_stmt_ = saved;
      return v;
    }
    }
    throw Error(ErrorKind::Internal, "unknown expression kind");
  }

  Value binary(const ast::Expr &e, std::vector<Value> &locals, int depth) {
    const std::string &op = e.op;
    if (op == "&&") {
      if (!eval(*e.args[0], locals, depth).v)
        return {TypeKind::Bool, 0};
      return {TypeKind::Bool, eval(*e.args[1], locals, depth).v ? 1 : 0};
    }
    if (op == "||") {
      if (eval(*e.args[0], locals, depth).v)
        return {TypeKind::Bool, 1};
      return {TypeKind::Bool, eval(*e.args[1], locals, depth).v ? 1 : 0};
    }
    Value a = eval(*e.args[0], locals, depth);
    Value b = eval(*e.args[1], locals, depth);
    const auto ua = static_cast<std::uint64_t>(a.v);
    const auto ub = static_cast<std::uint64_t>(b.v);
    auto boolean = [](bool x) { return Value{TypeKind::Bool, x ? 1 : 0}; };
    if (op == "+") return {TypeKind::Int, wrap(ua + ub)};
    if (op == "-") return {TypeKind::Int, wrap(ua - ub)};
    if (op == "*") return {TypeKind::Int, wrap(ua * ub)};
    if (op == "/" || op == "%") {
      if (b.v == 0)
        fault(FaultKind::DivZero);
      if (a.v == std::numeric_limits<std::int64_t>::min() && b.v == -1)
        return {TypeKind::Int, op == "/" ? a.v : 0};
      return {TypeKind::Int, op == "/" ? a.v / b.v : a.v % b.v};
    }
    if (op == "<") return boolean(a.v < b.v);
    if (op == "<=") return boolean(a.v <= b.v);
    if (op == ">") return boolean(a.v > b.v);
    if (op == ">=") return boolean(a.v >= b.v);
    if (op == "==") return boolean(a.v == b.v);
    if (op == "!=") return boolean(a.v != b.v);
    throw Error(ErrorKind::Internal, "unknown operator " + op);
  }

  const IRProgram &p_;
  const std::vector<std::int64_t> &input_;
  ExecutionLimits limits_;
  bool tracing_;
  std::size_t input_pos_ = 0;
  std::map<std::string, std::int64_t> index_;
  std::vector<const IRFunction *> fns_;
  std::vector<std::vector<std::int64_t>> heap_;
  std::int64_t heap_cells_ = 0;
  StatementId cur_stmt_ = 0;
  ExecutionResult result_;
};

} // namespace

ExecutionResult run_program(const IRProgram &p, const std::vector<std::int64_t> &input,
                            const ExecutionLimits &limits, bool trace) {
  if (!p.executable)
    throw Error(ErrorKind::Usage,
                "execution is unsupported for graph-imported programs");
  return Machine(p, input, limits, trace).run();
}

} // namespace paver
