#include <fstream>
#include <map>
#include <sstream>

#include "aara/frontend.hpp"

namespace aara {

namespace {

// Type terms live in a union-find arena. A term is either a variable or a
// constructor applied to argument terms.
class Unifier {
 public:
  enum class Ctor { Var, Int, Bool, Unit, List, Pair };

  int fresh() { return add(Ctor::Var, {}); }
  int con(Ctor c, std::vector<int> args = {}) { return add(c, std::move(args)); }

  int find(int t) {
    while (parent_[t] != t) t = parent_[t] = parent_[parent_[t]];
    return t;
  }

  void unify(int a, int b, Span at) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (ctor_[a] == Ctor::Var) return bind(a, b, at);
    if (ctor_[b] == Ctor::Var) return bind(b, a, at);
    if (ctor_[a] != ctor_[b]) fail(at, "type mismatch: " + show(a) + " vs " + show(b));
    parent_[a] = b;
    for (std::size_t i = 0; i < args_[a].size(); ++i) unify(args_[a][i], args_[b][i], at);
  }

  std::optional<SimpleType> ground(int t) {
    t = find(t);
    switch (ctor_[t]) {
      case Ctor::Var: return std::nullopt;
      case Ctor::Int: return SimpleType::integer();
      case Ctor::Bool: return SimpleType::boolean();
      case Ctor::Unit: return SimpleType::unit();
      case Ctor::List: {
        auto e = ground(args_[t][0]);
        if (!e) return std::nullopt;
        return SimpleType::list(*e);
      }
      case Ctor::Pair: {
        auto l = ground(args_[t][0]);
        auto r = ground(args_[t][1]);
        if (!l || !r) return std::nullopt;
        return SimpleType::pair(*l, *r);
      }
    }
    return std::nullopt;
  }

  // Unresolved variables that appear as list elements default to int.
  void default_elements(int t) {
    t = find(t);
    if (ctor_[t] == Ctor::List) {
      int e = find(args_[t][0]);
      if (ctor_[e] == Ctor::Var) parent_[e] = con(Ctor::Int);
    }
    for (int a : std::vector<int>(args_[t])) default_elements(a);
  }

  std::string show(int t) {
    t = find(t);
    switch (ctor_[t]) {
      case Ctor::Var: return "'a" + std::to_string(t);
      case Ctor::Int: return "int";
      case Ctor::Bool: return "bool";
      case Ctor::Unit: return "unit";
      case Ctor::List: return show(args_[t][0]) + " list";
      case Ctor::Pair: return "(" + show(args_[t][0]) + " × " + show(args_[t][1]) + ")";
    }
    return "?";
  }

  [[noreturn]] static void fail(Span at, const std::string& msg) {
    throw FrontendError({{Diagnostic::Severity::Error, msg, at}});
  }

 private:
  int add(Ctor c, std::vector<int> args) {
    int id = static_cast<int>(parent_.size());
    parent_.push_back(id);
    ctor_.push_back(c);
    args_.push_back(std::move(args));
    return id;
  }

  bool occurs(int v, int t) {
    t = find(t);
    if (t == v) return true;
    for (int a : args_[t])
      if (occurs(v, a)) return true;
    return false;
  }

  void bind(int v, int t, Span at) {
    if (occurs(v, t)) fail(at, "occurs check: cannot build infinite type " + show(v) + " = " + show(t));
    parent_[v] = t;
  }

  std::vector<int> parent_;
  std::vector<Ctor> ctor_;
  std::vector<std::vector<int>> args_;
};

using C = Unifier::Ctor;

struct Sig {
  int param;
  int result;
};

class Inferencer {
 public:
  explicit Inferencer(const Program& p) : program_(p) {
    for (const auto& f : p.functions()) sigs_[f.name] = {u_.fresh(), u_.fresh()};
  }

  Program run() {
    for (const auto& f : program_.functions()) {
      std::map<std::string, int> env{{f.param, sigs_[f.name].param}};
      int t = infer(*f.body, env);
      u_.unify(t, sigs_[f.name].result, f.body->span);
    }
    for (const auto& [name, sig] : sigs_) {
      u_.default_elements(sig.param);
      u_.default_elements(sig.result);
    }
    for (const auto& [node, t] : binders_) u_.default_elements(t);
    Program out;
    for (const auto& f : program_.functions()) {
      FunctionDef g = f;
      g.param_type = require(sigs_[f.name].param, f.span, "parameter of '" + f.name + "'");
      g.result_type = require(sigs_[f.name].result, f.span, "result of '" + f.name + "'");
      g.body = write_back(f.body);
      out.add(std::move(g));
    }
    return out;
  }

 private:
  SimpleType require(int t, Span at, const std::string& what) {
    auto g = u_.ground(t);
    if (!g)
      Unifier::fail(at, "the type of the " + what + " is not determined (" + u_.show(t) +
                            "); polymorphic functions are not supported, add a use that fixes the type");
    return *g;
  }

  int lookup(const std::map<std::string, int>& env, const std::string& x, Span at) {
    auto it = env.find(x);
    if (it == env.end()) Unifier::fail(at, "unbound variable '" + x + "'");
    return it->second;
  }

  int of_value(const Value& v) {
    switch (v.kind()) {
      case Value::Kind::Int: return u_.con(C::Int);
      case Value::Kind::Bool: return u_.con(C::Bool);
      case Value::Kind::Unit: return u_.con(C::Unit);
      case Value::Kind::Pair: return u_.con(C::Pair, {of_value(v.first()), of_value(v.second())});
      case Value::Kind::List: {
        int elem = u_.fresh();
        for (std::size_t i = 0; i < v.list_size(); ++i) u_.unify(elem, of_value(v.list_at(i)), {});
        return u_.con(C::List, {elem});
      }
    }
    return u_.fresh();
  }

  int infer(const CoreExpr& e, std::map<std::string, int> env) {
    const Span at = e.span;
    return std::visit(
        [&](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, expr::Lit>) {
            return of_value(n.value);
          } else if constexpr (std::is_same_v<T, expr::Var>) {
            return lookup(env, n.name, at);
          } else if constexpr (std::is_same_v<T, expr::Binop>) {
            int l = lookup(env, n.lhs, at);
            int r = lookup(env, n.rhs, at);
            switch (n.op) {
              case BinOp::Add:
              case BinOp::Sub:
              case BinOp::Mul:
                u_.unify(l, u_.con(C::Int), at);
                u_.unify(r, u_.con(C::Int), at);
                return u_.con(C::Int);
              case BinOp::Lt:
                u_.unify(l, u_.con(C::Int), at);
                u_.unify(r, u_.con(C::Int), at);
                return u_.con(C::Bool);
              case BinOp::Eq:
                u_.unify(l, r, at);
                return u_.con(C::Bool);
              case BinOp::Or:
              case BinOp::And:
                u_.unify(l, u_.con(C::Bool), at);
                u_.unify(r, u_.con(C::Bool), at);
                return u_.con(C::Bool);
            }
            return u_.fresh();
          } else if constexpr (std::is_same_v<T, expr::Unop>) {
            int a = lookup(env, n.arg, at);
            C c = n.op == UnOp::Not ? C::Bool : C::Int;
            u_.unify(a, u_.con(c), at);
            return u_.con(c);
          } else if constexpr (std::is_same_v<T, expr::App>) {
            auto it = sigs_.find(n.fn);
            if (it == sigs_.end()) Unifier::fail(at, "unknown function '" + n.fn + "'");
            u_.unify(lookup(env, n.arg, at), it->second.param, at);
            return it->second.result;
          } else if constexpr (std::is_same_v<T, expr::Let>) {
            int b = infer(*n.bound, env);
            binders_[&e] = b;
            if (n.binder != "_") env[n.binder] = b;
            return infer(*n.body, env);
          } else if constexpr (std::is_same_v<T, expr::Share>) {
            int s = lookup(env, n.source, at);
            env.erase(n.source);
            env[n.left] = s;
            env[n.right] = s;
            return infer(*n.body, env);
          } else if constexpr (std::is_same_v<T, expr::Tick>) {
            return u_.con(C::Unit);
          } else if constexpr (std::is_same_v<T, expr::MkPair>) {
            return u_.con(C::Pair, {lookup(env, n.first, at), lookup(env, n.second, at)});
          } else if constexpr (std::is_same_v<T, expr::Nil>) {
            return u_.con(C::List, {u_.fresh()});
          } else if constexpr (std::is_same_v<T, expr::Cons>) {
            int list = u_.con(C::List, {lookup(env, n.head, at)});
            u_.unify(lookup(env, n.tail, at), list, at);
            return list;
          } else if constexpr (std::is_same_v<T, expr::Cond>) {
            u_.unify(lookup(env, n.cond, at), u_.con(C::Bool), at);
            int a = infer(*n.then_branch, env);
            int b = infer(*n.else_branch, env);
            u_.unify(a, b, at);
            return a;
          } else if constexpr (std::is_same_v<T, expr::PairMatch>) {
            int l = u_.fresh();
            int r = u_.fresh();
            u_.unify(lookup(env, n.scrutinee, at), u_.con(C::Pair, {l, r}), at);
            env[n.first] = l;
            env[n.second] = r;
            return infer(*n.body, env);
          } else {
            int elem = u_.fresh();
            int list = u_.con(C::List, {elem});
            u_.unify(lookup(env, n.scrutinee, at), list, at);
            int a = infer(*n.nil_branch, env);
            env[n.head] = elem;
            env[n.tail] = list;
            int b = infer(*n.cons_branch, env);
            u_.unify(a, b, at);
            return a;
          }
        },
        e.node);
  }

  ExprPtr write_back(const ExprPtr& e) {
    const Span at = e->span;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, expr::Let>) {
            SimpleType t = require(binders_.at(e.get()), at,
                                   n.binder == "_" ? std::string("sequenced expression")
                                                   : "binder '" + n.binder + "'");
            return make_expr(expr::Let{write_back(n.bound), n.binder, write_back(n.body), t}, at);
          } else if constexpr (std::is_same_v<T, expr::Share>) {
            return make_expr(expr::Share{n.source, n.left, n.right, write_back(n.body)}, at);
          } else if constexpr (std::is_same_v<T, expr::Cond>) {
            return make_expr(expr::Cond{n.cond, write_back(n.then_branch), write_back(n.else_branch)}, at);
          } else if constexpr (std::is_same_v<T, expr::PairMatch>) {
            return make_expr(expr::PairMatch{n.scrutinee, n.first, n.second, write_back(n.body)}, at);
          } else if constexpr (std::is_same_v<T, expr::ListMatch>) {
            return make_expr(expr::ListMatch{n.scrutinee, write_back(n.nil_branch), n.head, n.tail,
                                             write_back(n.cons_branch)},
                             at);
          } else {
            return e;
          }
        },
        e->node);
  }

  const Program& program_;
  Unifier u_;
  std::map<std::string, Sig> sigs_;
  std::map<const CoreExpr*, int> binders_;
};

}  // namespace

Program infer_simple_types(const Program& p) { return Inferencer(p).run(); }

Program elaborate(const std::string& source) {
  return infer_simple_types(insert_shares(let_normalize(parse(source))));
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FrontendError({{Diagnostic::Severity::Error, "cannot open '" + path + "'", {}}});
  std::stringstream ss;
  ss << in.rdbuf();
  return elaborate(ss.str());
}

}  // namespace aara
