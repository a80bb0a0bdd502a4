#include <functional>
#include <map>

#include "aara/frontend.hpp"

namespace aara {

namespace {

constexpr const char* kAppendSource = R"(
let append xs ys =
  match xs with
  | [] -> ys
  | h :: t -> h :: append t ys
)";

class Normalizer {
 public:
  explicit Normalizer(const std::map<std::string, std::size_t>* arities) : arities_(arities) {}

  bool used_append() const { return used_append_; }

  std::string fresh() { return "_#" + std::to_string(++counter_); }

  ExprPtr norm(const SurfaceExpr& e) {
    using K = SurfaceExpr::Kind;
    const Span at = e.span;
    switch (e.kind) {
      case K::Var: return make_expr(expr::Var{e.name}, at);
      case K::Lit: return make_expr(expr::Lit{*e.literal}, at);
      case K::Tick: return make_expr(expr::Tick{e.tick}, at);
      case K::App: {
        if (arities_) {
          auto it = arities_->find(e.name);
          if (it != arities_->end() && it->second != e.children.size())
            error(at, "function '" + e.name + "' expects " + std::to_string(it->second) +
                          " argument(s) but is applied to " + std::to_string(e.children.size()));
        }
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          return tuple_then(std::move(vs), at, [&](const std::string& arg) {
            return make_expr(expr::App{e.name, arg}, at);
          });
        });
      }
      case K::Binop:
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          return make_expr(expr::Binop{e.binop, vs[0], vs[1]}, at);
        });
      case K::Unop:
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          return make_expr(expr::Unop{e.unop, vs[0]}, at);
        });
      case K::Tuple:
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          // (a, b, c) is (a, (b, c))
          std::string last = vs.back();
          vs.pop_back();
          return build_pairs(vs, last, at);
        });
      case K::ListLit:
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          if (vs.empty()) return make_expr(expr::Nil{}, at);
          std::string tail = fresh();
          return make_expr(expr::Let{make_expr(expr::Nil{}, at), tail, build_conses(vs, tail, at), {}}, at);
        });
      case K::Cons:
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          return make_expr(expr::Cons{vs[0], vs[1]}, at);
        });
      case K::Append:
        used_append_ = true;
        return with_vars(e.children, [&](std::vector<std::string> vs) {
          return tuple_then(std::move(vs), at, [&](const std::string& arg) {
            return make_expr(expr::App{"append", arg}, at);
          });
        });
      case K::Let:
        return make_expr(expr::Let{norm(*e.children[0]), e.name, norm(*e.children[1]), {}}, at);
      case K::Seq:
        return make_expr(expr::Let{norm(*e.children[0]), "_", norm(*e.children[1]), {}}, at);
      case K::If:
        return with_var(*e.children[0], [&](const std::string& c) {
          return make_expr(expr::Cond{c, norm(*e.children[1]), norm(*e.children[2])}, at);
        });
      case K::Match:
        return with_var(*e.children[0], [&](const std::string& s) { return match(s, e); });
      case K::Share:
        return make_expr(expr::Share{e.share_names[0], e.share_names[1], e.share_names[2],
                                     norm(*e.children[0])},
                         at);
    }
    error(at, "unhandled expression");
  }

  [[noreturn]] static void error(Span at, const std::string& msg) {
    throw FrontendError({{Diagnostic::Severity::Error, msg, at}});
  }

  /// Nested pair-matches binding `names` from the variable `src`.
  ExprPtr destructure(const std::string& src, const std::vector<std::string>& names, ExprPtr body,
                      Span at) {
    if (names.size() == 2) return make_expr(expr::PairMatch{src, names[0], names[1], body}, at);
    std::string rest = fresh();
    std::vector<std::string> tail(names.begin() + 1, names.end());
    return make_expr(expr::PairMatch{src, names[0], rest, destructure(rest, tail, body, at)}, at);
  }

 private:
  using Cont = std::function<ExprPtr(std::vector<std::string>)>;

  ExprPtr with_var(const SurfaceExpr& e, const std::function<ExprPtr(const std::string&)>& k) {
    if (e.kind == SurfaceExpr::Kind::Var) return k(e.name);
    ExprPtr bound = norm(e);
    std::string t = fresh();
    return make_expr(expr::Let{bound, t, k(t), {}}, e.span);
  }

  ExprPtr with_vars(const std::vector<SurfacePtr>& es, const Cont& k, std::size_t i = 0,
                    std::vector<std::string> acc = {}) {
    if (i == es.size()) return k(std::move(acc));
    return with_var(*es[i], [&](const std::string& v) {
      auto next = acc;
      next.push_back(v);
      return with_vars(es, k, i + 1, std::move(next));
    });
  }

  ExprPtr tuple_then(std::vector<std::string> vs, Span at,
                     const std::function<ExprPtr(const std::string&)>& k) {
    if (vs.size() == 1) return k(vs[0]);
    std::string t = fresh();
    std::string last = vs.back();
    vs.pop_back();
    return make_expr(expr::Let{build_pairs(vs, last, at), t, k(t), {}}, at);
  }

  // Builds (v0, (v1, ... (vn-1, last))) with intermediate lets.
  ExprPtr build_pairs(const std::vector<std::string>& init, const std::string& last, Span at) {
    if (init.size() == 1) return make_expr(expr::MkPair{init[0], last}, at);
    std::string t = fresh();
    std::vector<std::string> rest(init.begin(), init.end() - 1);
    auto inner = make_expr(expr::MkPair{init.back(), last}, at);
    return make_expr(expr::Let{inner, t, build_pairs(rest, t, at), {}}, at);
  }

  ExprPtr build_conses(const std::vector<std::string>& items, const std::string& tail, Span at) {
    if (items.size() == 1) return make_expr(expr::Cons{items[0], tail}, at);
    std::string t = fresh();
    std::vector<std::string> rest(items.begin(), items.end() - 1);
    auto inner = make_expr(expr::Cons{items.back(), tail}, at);
    return make_expr(expr::Let{inner, t, build_conses(rest, t, at), {}}, at);
  }

  ExprPtr match(const std::string& s, const SurfaceExpr& e) {
    using P = MatchArm::Pattern;
    const MatchArm* nil = nullptr;
    const MatchArm* cons = nullptr;
    const MatchArm* tuple = nullptr;
    const MatchArm* fallback = nullptr;
    std::vector<const MatchArm*> literals;
    for (const auto& a : e.arms) {
      if (fallback) error(a.span, "unreachable match arm after a catch-all pattern");
      switch (a.pattern) {
        case P::Nil:
          if (nil) error(a.span, "duplicate '[]' arm");
          nil = &a;
          break;
        case P::Cons:
          if (cons) error(a.span, "duplicate '::' arm");
          cons = &a;
          break;
        case P::Tuple:
          if (tuple) error(a.span, "duplicate tuple arm");
          tuple = &a;
          break;
        case P::Literal: literals.push_back(&a); break;
        case P::Bind: fallback = &a; break;
      }
    }
    const Span at = e.span;
    if (nil || cons) {
      if (!nil || !cons || tuple || !literals.empty() || fallback)
        error(at, "a list match needs exactly one '[]' arm and one 'h :: t' arm");
      return make_expr(expr::ListMatch{s, norm(*nil->body), cons->names[0], cons->names[1],
                                       norm(*cons->body)},
                       at);
    }
    if (tuple) {
      if (e.arms.size() != 1) error(at, "a tuple match takes exactly one arm");
      return destructure(s, tuple->names, norm(*tuple->body), at);
    }
    if (literals.empty()) {
      if (!fallback) error(at, "empty match");
      return bind_fallback(s, *fallback);
    }
    // Boolean matches with both constructors become a plain conditional.
    if (literals.size() == 2 && !fallback && literals[0]->literal->kind() == Value::Kind::Bool &&
        literals[1]->literal->kind() == Value::Kind::Bool &&
        literals[0]->literal->as_bool() != literals[1]->literal->as_bool()) {
      const MatchArm* t = literals[0]->literal->as_bool() ? literals[0] : literals[1];
      const MatchArm* f = literals[0]->literal->as_bool() ? literals[1] : literals[0];
      return make_expr(expr::Cond{s, norm(*t->body), norm(*f->body)}, at);
    }
    if (!fallback) error(at, "literal match needs a final catch-all arm");
    return literal_chain(s, literals, 0, *fallback);
  }

  ExprPtr bind_fallback(const std::string& s, const MatchArm& arm) {
    if (arm.names[0] == "_") return norm(*arm.body);
    return make_expr(expr::Let{make_expr(expr::Var{s}, arm.span), arm.names[0], norm(*arm.body), {}},
                     arm.span);
  }

  ExprPtr literal_chain(const std::string& s, const std::vector<const MatchArm*>& lits, std::size_t i,
                        const MatchArm& fallback) {
    if (i == lits.size()) return bind_fallback(s, fallback);
    const MatchArm& a = *lits[i];
    std::string lit = fresh();
    std::string test = fresh();
    auto cond = make_expr(expr::Cond{test, norm(*a.body), literal_chain(s, lits, i + 1, fallback)}, a.span);
    auto cmp = make_expr(expr::Let{make_expr(expr::Binop{BinOp::Eq, s, lit}, a.span), test, cond, {}}, a.span);
    return make_expr(expr::Let{make_expr(expr::Lit{*a.literal}, a.span), lit, cmp, {}}, a.span);
  }

  const std::map<std::string, std::size_t>* arities_;
  int counter_ = 0;
  bool used_append_ = false;
};

void normalize_functions(const SurfaceProgram& p, Normalizer& n, Program& out) {
  for (const auto& f : p.functions) {
    FunctionDef def;
    def.name = f.name;
    def.span = f.span;
    ExprPtr body = n.norm(*f.body);
    if (f.params.size() == 1) {
      def.param = f.params[0] == "_" ? n.fresh() : f.params[0];
    } else {
      def.param = "_arg";
      body = n.destructure(def.param, f.params, body, f.span);
    }
    def.body = body;
    out.add(std::move(def));
  }
}

}  // namespace

ExprPtr let_normalize(const SurfaceExpr& e) {
  Normalizer n(nullptr);
  return n.norm(e);
}

Program let_normalize(const SurfaceProgram& p) {
  std::map<std::string, std::size_t> arities;
  for (const auto& f : p.functions) arities[f.name] = f.params.size();
  bool has_append = arities.count("append") > 0;
  Normalizer n(&arities);
  Program out;
  normalize_functions(p, n, out);
  if (n.used_append() && !has_append) {
    SurfaceProgram lib = parse(kAppendSource);
    arities["append"] = 2;
    Program extra;
    normalize_functions(lib, n, extra);
    Program merged;
    for (auto& f : extra.functions()) merged.add(f);
    for (auto& f : out.functions()) merged.add(f);
    return merged;
  }
  return out;
}

}  // namespace aara
