#include "aara/constraints.hpp"

#include <chrono>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aara {

namespace {

ExprType to_expr(const VarType& t) {
  ExprType out;
  out.kind = t.kind;
  for (AnnVar v : t.ann) out.ann.push_back(LinExpr::var(v));
  for (const auto& c : t.children) out.children.push_back(to_expr(c));
  return out;
}

std::set<std::string> callees(const CoreExpr& e) {
  std::set<std::string> out;
  std::function<void(const CoreExpr&)> walk = [&](const CoreExpr& x) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, expr::App>) out.insert(n.fn);
          else if constexpr (std::is_same_v<T, expr::Let>) {
            walk(*n.bound);
            walk(*n.body);
          } else if constexpr (std::is_same_v<T, expr::Share> || std::is_same_v<T, expr::PairMatch>)
            walk(*n.body);
          else if constexpr (std::is_same_v<T, expr::Cond>) {
            walk(*n.then_branch);
            walk(*n.else_branch);
          } else if constexpr (std::is_same_v<T, expr::ListMatch>) {
            walk(*n.nil_branch);
            walk(*n.cons_branch);
          }
        },
        x.node);
  };
  walk(e);
  return out;
}

class Generator {
 public:
  Generator(const Program& p, ConstraintSystem& sys) : program_(p), sys_(sys), idx_(basis_indices(sys.cfg)) {
    relaxed_ = sys.cfg.kind == BasisKind::Mixed && sys.cfg.demotion;
    for (std::size_t i = 0; i < idx_.size(); ++i)
      if (idx_[i].b == 1 && idx_[i].k == 0) p10_ = i;
    for (const auto& f : p.functions()) graph_[f.name] = callees(*f.body);
  }

  VarType fresh_vars(const SimpleType& t, const std::string& prefix, const std::string& path = "") {
    VarType out;
    out.kind = t.kind();
    if (t.is_list()) {
      for (std::size_t i = 0; i < idx_.size(); ++i) {
        bool free = relaxed_ && idx_[i].b == 0;
        out.ann.push_back(var(prefix + path + "." + std::to_string(i), free));
      }
      if (relaxed_) {
        for (std::size_t i = 0; i < idx_.size(); ++i)
          if (idx_[i].b == 0) emit(LinExpr::var(out.ann[i]) + LinExpr::var(out.ann[p10_]), Relation::Ge, "domain", {});
      }
      annotations_.push_back(out.ann);
      out.children.push_back(fresh_vars(t.elem(), prefix, path + ".e"));
    } else if (t.is_pair()) {
      out.children.push_back(fresh_vars(t.left(), prefix, path + ".l"));
      out.children.push_back(fresh_vars(t.right(), prefix, path + ".r"));
    }
    return out;
  }

  AnnVar var(const std::string& base, bool free = false) {
    std::string name = base;
    for (int k = 2; sys_.lp.find_variable(name) != StandardFormLp::npos; ++k) name = base + "#" + std::to_string(k);
    AnnVar v = sys_.lp.add_variable(name, free);
    if (!free) scalars_.push_back(v);
    return v;
  }

  // Functions outside `only` get neither a signature nor constraints.
  void restrict_to(std::set<std::string> only) { only_ = std::move(only); }

  std::set<std::string> reachable(const std::string& from) const {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
      std::string f = todo.back();
      todo.pop_back();
      if (!seen.insert(f).second) continue;
      auto it = graph_.find(f);
      if (it != graph_.end()) todo.insert(todo.end(), it->second.begin(), it->second.end());
    }
    return seen;
  }

  void skeleton() {
    for (const auto& f : program_.functions()) {
      if (!only_.empty() && !only_.count(f.name)) continue;
      if (!f.param_type || !f.result_type) throw std::invalid_argument("function '" + f.name + "' is not typed");
      fn_ = f.name;
      FunSig sig;
      sig.name = f.name;
      sig.arg = fresh_vars(*f.param_type, f.name + ".arg");
      sig.result = fresh_vars(*f.result_type, f.name + ".res");
      sig.q_in = var(f.name + ".q");
      sig.q_out = var(f.name + ".q'");
      sys_.sigs[f.name] = sig;
      sys_.functions.push_back(f.name);
    }
  }

  void generate() {
    for (const auto& f : program_.functions()) {
      if (!only_.empty() && !only_.count(f.name)) continue;
      fn_ = f.name;
      const FunSig& sig = sys_.sigs.at(f.name);
      Ctx ctx{{f.param, to_expr(sig.arg)}};
      check(*f.body, ctx, to_expr(sig.result), LinExpr::var(sig.q_in), LinExpr::var(sig.q_out));
    }
  }

  LinExpr tiebreak() const {
    LinExpr sum;
    for (AnnVar v : scalars_) sum.add(v, 1);
    if (relaxed_) {
      // Free row-0 entries enter as p_{0,k} + p_{1,0}, which is bounded below.
      for (const auto& ann : annotations_)
        for (std::size_t i = 0; i < idx_.size(); ++i)
          if (idx_[i].b == 0) {
            sum.add(ann[i], 1);
            sum.add(ann[p10_], 1);
          }
    }
    return sum;
  }

 private:
  using Ctx = std::map<std::string, ExprType>;

  void emit(LinExpr e, Relation rel, const std::string& rule, Span at, const std::string& callee = {}) {
    if (e.is_constant()) {
      const Rational& c = e.constant();
      bool ok = rel == Relation::Ge ? c >= 0 : rel == Relation::Le ? c <= 0 : c == 0;
      if (ok) return;
    }
    std::string name = fn_ + "." + rule + "." + std::to_string(++rows_[fn_ + "." + rule]);
    sys_.lp.add_row(std::move(e), rel, name);
    sys_.origin.push_back({fn_, at, rule, callee});
  }

  std::vector<LinExpr> shift(const std::vector<LinExpr>& p) const {
    const auto& m = shift_matrix(sys_.cfg);
    std::vector<LinExpr> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        if (m[i][j] != 0) out[i] += m[i][j] * p[j];
    return out;
  }

  LinExpr delta(const std::vector<LinExpr>& p) const {
    const auto& d = delta_vector(sys_.cfg);
    LinExpr out;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (d[j] != 0) out += d[j] * p[j];
    return out;
  }

  // Subtyping A <: B, with one demotion slack per list edge when enabled.
  void sub(const ExprType& a, const ExprType& b, Span at, const std::string& callee = {}) {
    if (a.kind == SimpleType::Kind::List) {
      if (relaxed_) {
        AnnVar s = var(fn_ + ".demote." + std::to_string(++slacks_));
        for (std::size_t i = 0; i < idx_.size(); ++i) {
          LinExpr lhs = a.ann[i];
          if (idx_[i].b == 1 && idx_[i].k == 0) lhs -= LinExpr::var(s);
          if (idx_[i].b == 0) lhs += LinExpr::var(s);
          emit(lhs - b.ann[i], Relation::Ge, "sub", at, callee);
        }
      } else {
        for (std::size_t i = 0; i < idx_.size(); ++i) emit(a.ann[i] - b.ann[i], Relation::Ge, "sub", at, callee);
      }
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) sub(a.children[i], b.children[i], at, callee);
  }

  // A = B + C pointwise, recursively.
  void share(const ExprType& a, const ExprType& b, const ExprType& c, Span at) {
    for (std::size_t i = 0; i < a.ann.size(); ++i) emit(a.ann[i] - b.ann[i] - c.ann[i], Relation::Eq, "share", at);
    for (std::size_t i = 0; i < a.children.size(); ++i) share(a.children[i], b.children[i], c.children[i], at);
  }

  // Relax around a rule whose own turnstiles are (p, p').
  void relax(const LinExpr& q, const LinExpr& q_out, const LinExpr& p, const LinExpr& p_out, const std::string& rule,
             Span at, const std::string& callee = {}) {
    emit(q - p, Relation::Ge, rule, at, callee);
    emit(q - p - q_out + p_out, Relation::Ge, rule, at, callee);
  }

  static const ExprType& lookup(const Ctx& ctx, const std::string& x) {
    auto it = ctx.find(x);
    if (it == ctx.end()) throw std::logic_error("variable '" + x + "' missing from the typing context");
    return it->second;
  }

  bool recursive(const std::string& caller, const std::string& callee) const {
    std::set<std::string> seen;
    std::vector<std::string> todo{callee};
    while (!todo.empty()) {
      std::string f = todo.back();
      todo.pop_back();
      if (f == caller) return true;
      if (!seen.insert(f).second) continue;
      auto it = graph_.find(f);
      if (it != graph_.end()) todo.insert(todo.end(), it->second.begin(), it->second.end());
    }
    return false;
  }

  void check(const CoreExpr& e, Ctx ctx, const ExprType& b, const LinExpr& q, const LinExpr& q_out) {
    const Span at = e.span;
    if (e.as<expr::Lit>() || e.as<expr::Binop>() || e.as<expr::Unop>() || e.as<expr::Nil>()) {
      relax(q, q_out, LinExpr(), LinExpr(), "relax", at);
      return;
    }
    if (auto* n = e.as<expr::Var>()) {
      sub(lookup(ctx, n->name), b, at);
      relax(q, q_out, LinExpr(), LinExpr(), "relax", at);
      return;
    }
    if (auto* n = e.as<expr::MkPair>()) {
      sub(lookup(ctx, n->first), b.left(), at);
      sub(lookup(ctx, n->second), b.right(), at);
      relax(q, q_out, LinExpr(), LinExpr(), "relax", at);
      return;
    }
    if (auto* n = e.as<expr::Tick>()) {
      relax(q, q_out, LinExpr(max0(n->amount)), LinExpr(max0(-n->amount)), "tick", at);
      return;
    }
    if (auto* n = e.as<expr::Cons>()) {
      sub(lookup(ctx, n->head), b.elem(), at);
      ExprType tail = b;
      tail.ann = shift(b.ann);
      sub(lookup(ctx, n->tail), tail, at);
      relax(q, q_out, delta(b.ann), LinExpr(), "cons", at);
      return;
    }
    if (auto* n = e.as<expr::App>()) {
      const FunSig& sig = sys_.sigs.at(n->fn);
      const bool rec = recursive(fn_, n->fn);
      const std::string callee = rec ? n->fn : std::string();
      if (rec) sys_.recursive_calls.push_back({fn_, n->fn, at});
      else sys_.external_callees.insert(n->fn);
      sub(lookup(ctx, n->arg), to_expr(sig.arg), at, callee.empty() ? n->fn : callee);
      sub(to_expr(sig.result), b, at, callee.empty() ? n->fn : callee);
      relax(q, q_out, LinExpr::var(sig.q_in), LinExpr::var(sig.q_out), "app", at, n->fn);
      return;
    }
    if (auto* n = e.as<expr::Let>()) {
      const std::string label = n->binder == "_" ? "seq" : n->binder;
      const SimpleType t = n->binder_type ? *n->binder_type : SimpleType::unit();
      VarType ax = fresh_vars(t, fn_ + ".let." + label);
      LinExpr p = LinExpr::var(var(fn_ + ".let." + label + ".p"));
      const std::set<std::string> fv1 = free_vars(*n->bound);
      Ctx g1;
      Ctx g2;
      for (auto& [x, ty] : ctx) (fv1.count(x) ? g1 : g2).emplace(x, ty);
      check(*n->bound, std::move(g1), to_expr(ax), q, p);
      if (n->binder != "_") g2[n->binder] = to_expr(ax);
      check(*n->body, std::move(g2), b, p, q_out);
      return;
    }
    if (auto* n = e.as<expr::Share>()) {
      ExprType src = lookup(ctx, n->source);
      const SimpleType shape = simple(src);
      ExprType l = to_expr(fresh_vars(shape, fn_ + ".share." + n->left));
      ExprType r = to_expr(fresh_vars(shape, fn_ + ".share." + n->right));
      share(src, l, r, at);
      ctx.erase(n->source);
      ctx[n->left] = l;
      ctx[n->right] = r;
      check(*n->body, std::move(ctx), b, q, q_out);
      return;
    }
    if (auto* n = e.as<expr::Cond>()) {
      ctx.erase(n->cond);
      check(*n->then_branch, ctx, b, q, q_out);
      check(*n->else_branch, std::move(ctx), b, q, q_out);
      return;
    }
    if (auto* n = e.as<expr::PairMatch>()) {
      ExprType src = lookup(ctx, n->scrutinee);
      ctx.erase(n->scrutinee);
      ctx[n->first] = src.left();
      ctx[n->second] = src.right();
      check(*n->body, std::move(ctx), b, q, q_out);
      return;
    }
    if (auto* n = e.as<expr::ListMatch>()) {
      ExprType src = lookup(ctx, n->scrutinee);
      ctx.erase(n->scrutinee);
      check(*n->nil_branch, ctx, b, q, q_out);
      ExprType tail = src;
      tail.ann = shift(src.ann);
      ctx[n->head] = src.elem();
      ctx[n->tail] = tail;
      check(*n->cons_branch, std::move(ctx), b, q + delta(src.ann), q_out);
      return;
    }
    throw std::logic_error("unknown expression form");
  }

  static SimpleType simple(const ExprType& t) {
    switch (t.kind) {
      case SimpleType::Kind::Int: return SimpleType::integer();
      case SimpleType::Kind::Bool: return SimpleType::boolean();
      case SimpleType::Kind::Unit: return SimpleType::unit();
      case SimpleType::Kind::List: return SimpleType::list(simple(t.elem()));
      case SimpleType::Kind::Pair: return SimpleType::pair(simple(t.left()), simple(t.right()));
    }
    return SimpleType::unit();
  }

  const Program& program_;
  ConstraintSystem& sys_;
  std::vector<BasisIndex> idx_;
  bool relaxed_ = false;
  std::size_t p10_ = 0;
  std::string fn_;
  std::map<std::string, int> rows_;
  int slacks_ = 0;
  std::vector<AnnVar> scalars_;
  std::vector<std::vector<AnnVar>> annotations_;
  std::map<std::string, std::set<std::string>> graph_;
  std::set<std::string> only_;
};

// Growth rank of each basis index: position in canonical order, from 1.
void weigh(const VarType& t, const std::vector<Rational>& weight, LinExpr& out) {
  for (std::size_t i = 0; i < t.ann.size(); ++i) out.add(t.ann[i], weight[i]);
  for (const auto& c : t.children) weigh(c, weight, out);
}

}  // namespace

void annotate_skeleton(const Program& p, ConstraintSystem& sys) {
  Generator g(p, sys);
  g.skeleton();
}

std::vector<LinExpr> build_objective(const ConstraintSystem& sys) {
  const FunSig& sig = sys.sigs.at(sys.entry);
  const std::size_t n = basis_size(sys.cfg);
  std::vector<Rational> weight(n);
  Rational w = 1;
  for (std::size_t i = 0; i < n; ++i) {
    w *= 10000;
    weight[i] = w;
  }
  LinExpr primary = LinExpr::var(sig.q_in);
  weigh(sig.arg, weight, primary);
  return {primary};
}

ConstraintSystem gen_constraints(const Program& p, const BasisConfig& cfg, const std::string& entry) {
  cfg.validate();
  ConstraintSystem sys;
  sys.cfg = cfg;
  if (p.empty()) return sys;
  sys.entry = entry.empty() ? p.functions().back().name : entry;
  if (!p.find(sys.entry)) throw std::invalid_argument("unknown entry function '" + sys.entry + "'");
  Generator g(p, sys);
  g.restrict_to(g.reachable(sys.entry));
  g.skeleton();
  g.generate();
  sys.objectives = build_objective(sys);
  sys.objectives.push_back(g.tiebreak());
  return sys;
}

namespace {

AnnotatedType substitute_type(const VarType& t, const std::vector<Rational>& values) {
  AnnotatedType out;
  out.kind = t.kind;
  for (AnnVar v : t.ann) out.ann.push_back(values.at(v));
  for (const auto& c : t.children) out.children.push_back(substitute_type(c, values));
  return out;
}

}  // namespace

SolvedSig substitute(const FunSig& sig, const std::vector<Rational>& values) {
  return {substitute_type(sig.arg, values), substitute_type(sig.result, values), values.at(sig.q_in),
          values.at(sig.q_out)};
}

std::string explain_infeasibility(const ConstraintSystem& sys, const LpOutcome& outcome) {
  std::ostringstream os;
  os << "no bound exists with the " << to_string(sys.cfg.kind) << " basis at this degree";
  std::set<std::string> functions;
  std::vector<std::string> calls;
  for (std::size_t row : outcome.certificate) {
    if (row >= sys.origin.size()) continue;
    const Provenance& o = sys.origin[row];
    functions.insert(o.function);
    for (const auto& rc : sys.recursive_calls) {
      if (!sys.external_callees.count(rc.callee)) continue;
      if (rc.caller == o.function && rc.callee == o.callee && rc.span == o.span) {
        std::string text = "'" + rc.callee + "' at " + rc.span.str() + " (in " + rc.caller + ")";
        if (std::find(calls.begin(), calls.end(), text) == calls.end()) calls.push_back(text);
      }
    }
  }
  if (!functions.empty()) {
    os << "; conflicting constraints come from";
    bool first = true;
    for (const auto& f : functions) {
      os << (first ? " " : ", ") << f;
      first = false;
    }
  }
  if (!calls.empty()) {
    os << "\nhint: the recursive call";
    os << (calls.size() > 1 ? "s " : " ");
    for (std::size_t i = 0; i < calls.size(); ++i) os << (i ? ", " : "") << calls[i];
    os << " must reuse the signature demanded by the outside caller; this bound may need resource-polymorphic"
          " recursion, which is not supported";
  } else {
    os << "\nhint: the cost may grow faster than this basis allows; try a higher degree or another basis";
  }
  return os.str();
}

Analysis analyze(const Program& p, const BasisConfig& cfg, const std::string& entry) {
  const auto start = std::chrono::steady_clock::now();
  Analysis a;
  a.system = gen_constraints(p, cfg, entry);
  if (!p.empty()) {
    a.outcome = lexicographic_solve(a.system.lp, a.system.objectives);
    if (a.outcome.optimal()) {
      for (const auto& [name, sig] : a.system.sigs) a.sigs[name] = substitute(sig, a.outcome.values);
    } else if (a.outcome.status == LpOutcome::Status::Infeasible) {
      a.diagnosis = explain_infeasibility(a.system, a.outcome);
    } else {
      a.diagnosis = "the objective is unbounded; the constraint system is missing a domain restriction";
    }
  } else {
    a.outcome.status = LpOutcome::Status::Optimal;
  }
  a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return a;
}

WitnessCheck check_witness(const ConstraintSystem& sys, const std::map<std::string, Rational>& fixed,
                           const std::optional<std::string>& only_function) {
  WitnessCheck out;
  StandardFormLp lp;
  for (const auto& v : sys.lp.variables()) lp.add_variable(v.name, v.free);
  for (std::size_t i = 0; i < sys.lp.rows().size(); ++i) {
    if (only_function && sys.origin[i].function != *only_function) continue;
    const LpRow& r = sys.lp.rows()[i];
    lp.add_row(r.expr, r.rel, r.name);
  }
  for (const auto& [name, value] : fixed) {
    std::size_t id = lp.find_variable(name);
    if (id == StandardFormLp::npos) {
      out.unknown.push_back(name);
      continue;
    }
    if (value < 0 && !lp.variables()[id].free) {
      out.unknown.push_back(name + " (negative value for a nonnegative variable)");
      continue;
    }
    lp.add_row(LinExpr::var(id) - LinExpr(value), Relation::Eq, "fix." + name);
  }
  out.outcome = solve(lp, LinExpr());
  out.feasible = out.unknown.empty() && out.outcome.optimal();
  return out;
}

std::vector<std::vector<std::string>> list_variable_names(const ConstraintSystem& sys, const VarType& t) {
  std::vector<std::vector<std::string>> out;
  std::function<void(const VarType&)> walk = [&](const VarType& x) {
    if (x.kind == SimpleType::Kind::List) {
      std::vector<std::string> names;
      for (AnnVar v : x.ann) names.push_back(sys.lp.variables()[v].name);
      out.push_back(names);
    }
    for (const auto& c : x.children) walk(c);
  };
  walk(t);
  return out;
}

}  // namespace aara
