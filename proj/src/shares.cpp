#include <map>

#include "aara/frontend.hpp"

namespace aara {

namespace {

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& sub);

std::string ren(const std::string& v, const std::map<std::string, std::string>& sub) {
  auto it = sub.find(v);
  return it == sub.end() ? v : it->second;
}

std::map<std::string, std::string> without(std::map<std::string, std::string> sub,
                                           std::initializer_list<std::string> bound) {
  for (const auto& b : bound) sub.erase(b);
  return sub;
}

ExprPtr rename_under(const ExprPtr& e, const std::map<std::string, std::string>& sub,
                     std::initializer_list<std::string> bound) {
  auto inner = without(sub, bound);
  return inner.empty() ? e : rename(e, inner);
}

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& sub) {
  const Span at = e->span;
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Lit> || std::is_same_v<T, expr::Tick> ||
                      std::is_same_v<T, expr::Nil>) {
          return e;
        } else if constexpr (std::is_same_v<T, expr::Var>) {
          return make_expr(expr::Var{ren(n.name, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::Binop>) {
          return make_expr(expr::Binop{n.op, ren(n.lhs, sub), ren(n.rhs, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::Unop>) {
          return make_expr(expr::Unop{n.op, ren(n.arg, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::App>) {
          return make_expr(expr::App{n.fn, ren(n.arg, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::MkPair>) {
          return make_expr(expr::MkPair{ren(n.first, sub), ren(n.second, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::Cons>) {
          return make_expr(expr::Cons{ren(n.head, sub), ren(n.tail, sub)}, at);
        } else if constexpr (std::is_same_v<T, expr::Let>) {
          return make_expr(expr::Let{rename(n.bound, sub), n.binder,
                                     rename_under(n.body, sub, {n.binder}), n.binder_type},
                           at);
        } else if constexpr (std::is_same_v<T, expr::Share>) {
          return make_expr(expr::Share{ren(n.source, sub), n.left, n.right,
                                       rename_under(n.body, sub, {n.left, n.right})},
                           at);
        } else if constexpr (std::is_same_v<T, expr::Cond>) {
          return make_expr(expr::Cond{ren(n.cond, sub), rename(n.then_branch, sub),
                                      rename(n.else_branch, sub)},
                           at);
        } else if constexpr (std::is_same_v<T, expr::PairMatch>) {
          return make_expr(expr::PairMatch{ren(n.scrutinee, sub), n.first, n.second,
                                           rename_under(n.body, sub, {n.first, n.second})},
                           at);
        } else {
          static_assert(std::is_same_v<T, expr::ListMatch>);
          return make_expr(expr::ListMatch{ren(n.scrutinee, sub), rename(n.nil_branch, sub), n.head,
                                           n.tail, rename_under(n.cons_branch, sub, {n.head, n.tail})},
                           at);
        }
      },
      e->node);
}

// A slot is one sequential position of a node: either a bare variable, or a
// group of alternative sub-expressions, each with the names it binds.
struct Alt {
  ExprPtr expr;
  std::vector<std::string> bound;
};

struct Slot {
  std::optional<std::string> var;
  std::vector<Alt> alts;

  int uses(const std::string& x) const {
    if (var) return *var == x ? 1 : 0;
    int best = 0;
    for (const auto& a : alts) {
      if (std::find(a.bound.begin(), a.bound.end(), x) != a.bound.end()) continue;
      best = std::max(best, use_count(*a.expr, x));
    }
    return best;
  }
};

std::vector<Slot> slots_of(const CoreExpr& e) {
  auto v = [](const std::string& s) { return Slot{s, {}}; };
  auto g = [](std::vector<Alt> alts) { return Slot{std::nullopt, std::move(alts)}; };
  return std::visit(
      [&](const auto& n) -> std::vector<Slot> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Binop>) return {v(n.lhs), v(n.rhs)};
        else if constexpr (std::is_same_v<T, expr::MkPair>) return {v(n.first), v(n.second)};
        else if constexpr (std::is_same_v<T, expr::Cons>) return {v(n.head), v(n.tail)};
        else if constexpr (std::is_same_v<T, expr::Let>)
          return {g({{n.bound, {}}}), g({{n.body, {n.binder}}})};
        else if constexpr (std::is_same_v<T, expr::Share>)
          return {v(n.source), g({{n.body, {n.left, n.right}}})};
        else if constexpr (std::is_same_v<T, expr::Cond>)
          return {v(n.cond), g({{n.then_branch, {}}, {n.else_branch, {}}})};
        else if constexpr (std::is_same_v<T, expr::PairMatch>)
          return {v(n.scrutinee), g({{n.body, {n.first, n.second}}})};
        else if constexpr (std::is_same_v<T, expr::ListMatch>)
          return {v(n.scrutinee), g({{n.nil_branch, {}}, {n.cons_branch, {n.head, n.tail}}})};
        else return {};
      },
      e.node);
}

// Rebuilds a node from renamed slots, in the order produced by slots_of.
ExprPtr rebuild(const CoreExpr& e, const std::vector<Slot>& s) {
  const Span at = e.span;
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Binop>)
          return make_expr(expr::Binop{n.op, *s[0].var, *s[1].var}, at);
        else if constexpr (std::is_same_v<T, expr::MkPair>)
          return make_expr(expr::MkPair{*s[0].var, *s[1].var}, at);
        else if constexpr (std::is_same_v<T, expr::Cons>)
          return make_expr(expr::Cons{*s[0].var, *s[1].var}, at);
        else if constexpr (std::is_same_v<T, expr::Let>)
          return make_expr(expr::Let{s[0].alts[0].expr, n.binder, s[1].alts[0].expr, n.binder_type}, at);
        else if constexpr (std::is_same_v<T, expr::Share>)
          return make_expr(expr::Share{*s[0].var, n.left, n.right, s[1].alts[0].expr}, at);
        else if constexpr (std::is_same_v<T, expr::Cond>)
          return make_expr(expr::Cond{*s[0].var, s[1].alts[0].expr, s[1].alts[1].expr}, at);
        else if constexpr (std::is_same_v<T, expr::PairMatch>)
          return make_expr(expr::PairMatch{*s[0].var, n.first, n.second, s[1].alts[0].expr}, at);
        else if constexpr (std::is_same_v<T, expr::ListMatch>)
          return make_expr(expr::ListMatch{*s[0].var, s[1].alts[0].expr, n.head, n.tail,
                                           s[1].alts[1].expr},
                           at);
        else return make_expr(n, at);
      },
      e.node);
}

class Sharer {
  struct Split {
    std::string source;
    std::vector<std::string> names;  // one per slot that uses the source
  };

 public:
  ExprPtr run(const ExprPtr& e) {
    std::vector<Slot> slots = slots_of(*e);
    if (slots.empty()) return e;

    std::vector<Split> splits;
    for (const auto& x : free_vars(*e)) {
      std::vector<int> counts;
      int users = 0;
      int total = 0;
      for (const auto& s : slots) {
        counts.push_back(s.uses(x));
        users += counts.back() > 0 ? 1 : 0;
        total += counts.back();
      }
      if (users < 2) continue;
      std::vector<std::string> pool = pool_for(x, total);
      const std::string root = roots_.at(x);
      Split split{x, {}};
      std::size_t next = 0;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (counts[i] == 0) continue;
        std::vector<std::string> part(pool.begin() + next, pool.begin() + next + counts[i]);
        next += counts[i];
        std::string name = part.size() == 1 ? part[0] : mint(root);
        if (part.size() > 1) pools_[name] = part;
        roots_[name] = root;
        rename_slot(slots[i], x, name);
        split.names.push_back(name);
      }
      splits.push_back(std::move(split));
    }

    for (auto& s : slots)
      for (auto& a : s.alts) a.expr = run(a.expr);
    ExprPtr out = rebuild(*e, slots);

    for (auto it = splits.rbegin(); it != splits.rend(); ++it) out = wrap(*it, out, e->span);
    return out;
  }

 private:
  // Leaf copy names reserved for `x`. A copy that is itself split later draws
  // from the sub-range it was handed.
  std::vector<std::string> pool_for(const std::string& x, int total) {
    auto it = pools_.find(x);
    if (it != pools_.end() && static_cast<int>(it->second.size()) >= total) {
      return std::vector<std::string>(it->second.begin(), it->second.begin() + total);
    }
    roots_.emplace(x, x);
    const std::string& root = roots_.at(x);
    std::vector<std::string> pool;
    for (int i = 0; i < total; ++i) pool.push_back(mint(root));
    pools_[x] = pool;
    return pool;
  }

  std::string mint(const std::string& root) { return root + "#" + std::to_string(++counters_[root]); }

  static void rename_slot(Slot& s, const std::string& from, const std::string& to) {
    if (s.var) {
      if (*s.var == from) s.var = to;
      return;
    }
    for (auto& a : s.alts) {
      if (std::find(a.bound.begin(), a.bound.end(), from) != a.bound.end()) continue;
      a.expr = rename(a.expr, {{from, to}});
    }
  }

  // Share(x, n1, m1, Share(m1, n2, m2, ... Share(mk, n(k-1), nk, body)))
  ExprPtr wrap(const Split& s, ExprPtr body, Span at) {
    const std::size_t k = s.names.size();
    const std::string root = roots_.at(s.source);
    std::vector<std::string> sources{s.source};
    for (std::size_t i = 0; i + 2 < k; ++i) sources.push_back(mint(root));
    for (std::size_t i = k - 1; i-- > 0;) {
      const std::string right = i + 2 == k ? s.names[k - 1] : sources[i + 1];
      body = make_expr(expr::Share{sources[i], s.names[i], right, body}, at);
    }
    return body;
  }

  std::map<std::string, std::string> roots_;
  std::map<std::string, int> counters_;
  std::map<std::string, std::vector<std::string>> pools_;
};

}  // namespace

ExprPtr insert_shares(const ExprPtr& e) {
  Sharer s;
  return s.run(e);
}

Program insert_shares(const Program& p) {
  Program out;
  for (const auto& f : p.functions()) {
    FunctionDef g = f;
    Sharer s;
    g.body = s.run(f.body);
    out.add(std::move(g));
  }
  return out;
}

}  // namespace aara
