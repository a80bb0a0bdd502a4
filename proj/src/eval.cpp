#include "aara/eval.hpp"

#include <memory>
#include <optional>

namespace aara {

ResourcePair compose(const ResourcePair& a, const ResourcePair& b) {
  return {a.q + max0(b.q - a.q_out), b.q_out + max0(a.q_out - b.q)};
}

ResourcePair tick_pair(const Rational& r) { return {max0(r), max0(-r)}; }

FuelExhausted::FuelExhausted(PartialOutcome partial)
    : std::runtime_error("fuel exhausted (watermark " + to_string(partial.watermark) + ")"),
      partial_(std::move(partial)) {}

RuntimeError::RuntimeError(const std::string& message, Span span)
    : std::runtime_error("runtime error at " + span.str() + ": " + message), span_(span) {}

namespace {

// Persistent environment: a shared singly linked list of bindings.
struct EnvNode {
  std::string name;
  Value value;
  std::shared_ptr<const EnvNode> next;
};
using Env = std::shared_ptr<const EnvNode>;

Env extend(Env env, std::string name, Value v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(env)});
}

const Value& lookup(const Env& env, const std::string& name, Span at) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == name) return n->value;
  throw RuntimeError("unbound variable '" + name + "'", at);
}

struct LetFrame {
  std::string binder;
  const CoreExpr* body;
  Env env;
};

struct Machine {
  const Program& program;
  std::uint64_t fuel;
  std::uint64_t steps = 0;
  ResourcePair acc{};

  // Returns nullopt when fuel runs out.
  std::optional<Value> run(const CoreExpr* control, Env env) {
    std::vector<LetFrame> stack;
    for (;;) {
      if (steps == fuel) return std::nullopt;
      ++steps;
      std::optional<Value> result = step(control, env, stack);
      if (!result) continue;
      if (stack.empty()) return result;
      LetFrame frame = std::move(stack.back());
      stack.pop_back();
      env = frame.binder == "_" ? frame.env : extend(frame.env, frame.binder, std::move(*result));
      control = frame.body;
    }
  }

  // Either produces a value, or updates control/env (and maybe pushes a frame).
  std::optional<Value> step(const CoreExpr*& control, Env& env, std::vector<LetFrame>& stack) {
    const CoreExpr& e = *control;
    const Span at = e.span;
    auto var = [&](const std::string& x) -> const Value& { return lookup(env, x, at); };

    if (auto* n = e.as<expr::Lit>()) return n->value;
    if (auto* n = e.as<expr::Var>()) return var(n->name);
    if (auto* n = e.as<expr::Binop>()) return binop(n->op, var(n->lhs), var(n->rhs), at);
    if (auto* n = e.as<expr::Unop>()) {
      const Value& a = var(n->arg);
      if (n->op == UnOp::Not) {
        expect(a, Value::Kind::Bool, at);
        return Value::boolean(!a.as_bool());
      }
      expect(a, Value::Kind::Int, at);
      return Value::integer(-a.as_int());
    }
    if (auto* n = e.as<expr::Tick>()) {
      acc = compose(acc, tick_pair(n->amount));
      return Value::unit();
    }
    if (auto* n = e.as<expr::MkPair>()) return Value::pair(var(n->first), var(n->second));
    if (e.as<expr::Nil>()) return Value::nil();
    if (auto* n = e.as<expr::Cons>()) {
      const Value& t = var(n->tail);
      expect(t, Value::Kind::List, at);
      return Value::cons(var(n->head), t);
    }
    if (auto* n = e.as<expr::App>()) {
      const FunctionDef* f = program.find(n->fn);
      if (!f) throw RuntimeError("unknown function '" + n->fn + "'", at);
      env = extend(nullptr, f->param, var(n->arg));
      control = f->body.get();
      return std::nullopt;
    }
    if (auto* n = e.as<expr::Let>()) {
      stack.push_back({n->binder, n->body.get(), env});
      control = n->bound.get();
      return std::nullopt;
    }
    if (auto* n = e.as<expr::Share>()) {
      Value v = var(n->source);
      env = extend(extend(env, n->left, v), n->right, v);
      control = n->body.get();
      return std::nullopt;
    }
    if (auto* n = e.as<expr::Cond>()) {
      const Value& c = var(n->cond);
      expect(c, Value::Kind::Bool, at);
      control = c.as_bool() ? n->then_branch.get() : n->else_branch.get();
      return std::nullopt;
    }
    if (auto* n = e.as<expr::PairMatch>()) {
      Value s = var(n->scrutinee);
      expect(s, Value::Kind::Pair, at);
      env = extend(extend(env, n->first, s.first()), n->second, s.second());
      control = n->body.get();
      return std::nullopt;
    }
    if (auto* n = e.as<expr::ListMatch>()) {
      Value s = var(n->scrutinee);
      expect(s, Value::Kind::List, at);
      if (s.list_size() == 0) {
        control = n->nil_branch.get();
      } else {
        env = extend(extend(env, n->head, s.list_at(0)), n->tail, s.list_tail());
        control = n->cons_branch.get();
      }
      return std::nullopt;
    }
    throw RuntimeError("unknown expression form", at);
  }

  static void expect(const Value& v, Value::Kind k, Span at) {
    if (v.kind() != k) throw RuntimeError("ill-shaped value " + v.str(), at);
  }

  static Value binop(BinOp op, const Value& a, const Value& b, Span at) {
    switch (op) {
      case BinOp::Eq: return Value::boolean(a == b);
      case BinOp::Or:
      case BinOp::And:
        expect(a, Value::Kind::Bool, at);
        expect(b, Value::Kind::Bool, at);
        return Value::boolean(op == BinOp::Or ? a.as_bool() || b.as_bool() : a.as_bool() && b.as_bool());
      default: break;
    }
    expect(a, Value::Kind::Int, at);
    expect(b, Value::Kind::Int, at);
    switch (op) {
      case BinOp::Add: return Value::integer(a.as_int() + b.as_int());
      case BinOp::Sub: return Value::integer(a.as_int() - b.as_int());
      case BinOp::Mul: return Value::integer(a.as_int() * b.as_int());
      case BinOp::Lt: return Value::boolean(a.as_int() < b.as_int());
      default: break;
    }
    throw RuntimeError("bad operator", at);
  }
};

CostOutcome run_or_throw(Machine& m, const CoreExpr* e, Env env) {
  auto v = m.run(e, std::move(env));
  if (!v) throw FuelExhausted({m.acc.q, true});
  return {std::move(*v), m.acc.q, m.acc.q_out, m.steps};
}

Env entry_env(const Program& p, const std::string& entry, const Value& arg, const FunctionDef*& f) {
  f = p.find(entry);
  if (!f) throw RuntimeError("unknown function '" + entry + "'", {});
  if (f->param_type && !arg.has_type(*f->param_type))
    throw RuntimeError("argument " + arg.str() + " does not have type " + f->param_type->str(), f->span);
  return extend(nullptr, f->param, arg);
}

}  // namespace

CostOutcome eval(const Program& p, const std::string& entry, const Value& arg, std::uint64_t fuel) {
  const FunctionDef* f = nullptr;
  Env env = entry_env(p, entry, arg, f);
  Machine m{p, fuel};
  return run_or_throw(m, f->body.get(), env);
}

CostOutcome eval_expr(const Program& p, const ExprPtr& e, const Bindings& bindings, std::uint64_t fuel) {
  Env env;
  for (const auto& [name, v] : bindings) env = extend(env, name, v);
  Machine m{p, fuel};
  return run_or_throw(m, e.get(), env);
}

PartialOutcome watermark(const Program& p, const std::string& entry, const Value& arg,
                         std::uint64_t fuel) {
  const FunctionDef* f = nullptr;
  Env env = entry_env(p, entry, arg, f);
  Machine m{p, fuel};
  auto v = m.run(f->body.get(), env);
  return {m.acc.q, !v.has_value()};
}

}  // namespace aara
