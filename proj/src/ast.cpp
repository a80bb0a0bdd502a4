#include "aara/ast.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace aara {

std::string Span::str() const { return std::to_string(line) + ":" + std::to_string(column); }

// ---------------------------------------------------------------------------
// SimpleType

SimpleType SimpleType::list(SimpleType elem) {
  SimpleType t(Kind::List);
  t.first_ = std::make_shared<const SimpleType>(std::move(elem));
  return t;
}

SimpleType SimpleType::pair(SimpleType left, SimpleType right) {
  SimpleType t(Kind::Pair);
  t.first_ = std::make_shared<const SimpleType>(std::move(left));
  t.second_ = std::make_shared<const SimpleType>(std::move(right));
  return t;
}

const SimpleType& SimpleType::elem() const {
  if (kind_ != Kind::List) throw std::logic_error("elem() on non-list type");
  return *first_;
}

const SimpleType& SimpleType::left() const {
  if (kind_ != Kind::Pair) throw std::logic_error("left() on non-pair type");
  return *first_;
}

const SimpleType& SimpleType::right() const {
  if (kind_ != Kind::Pair) throw std::logic_error("right() on non-pair type");
  return *second_;
}

std::string SimpleType::str() const {
  switch (kind_) {
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Unit: return "unit";
    case Kind::List: {
      std::string inner = elem().str();
      return inner + " list";
    }
    case Kind::Pair: return "(" + left().str() + " × " + right().str() + ")";
  }
  return "?";
}

bool operator==(const SimpleType& a, const SimpleType& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case SimpleType::Kind::List: return *a.first_ == *b.first_;
    case SimpleType::Kind::Pair: return *a.first_ == *b.first_ && *a.second_ == *b.second_;
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// Value

Value Value::integer(BigInt i) {
  Value v;
  v.rep_ = std::move(i);
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.rep_ = b;
  return v;
}

Value Value::unit() {
  Value v;
  v.rep_ = std::monostate{};
  return v;
}

Value Value::pair(Value first, Value second) {
  Value v;
  v.rep_ = std::make_shared<const std::pair<Value, Value>>(std::move(first), std::move(second));
  return v;
}

Value Value::list(std::vector<Value> items) {
  Value v;
  v.rep_ = ListRep{std::make_shared<const std::vector<Value>>(std::move(items)), 0};
  return v;
}

Value Value::cons(const Value& head, const Value& tail) {
  std::vector<Value> items;
  items.reserve(tail.list_size() + 1);
  items.push_back(head);
  for (std::size_t i = 0; i < tail.list_size(); ++i) items.push_back(tail.list_at(i));
  return list(std::move(items));
}

Value::Kind Value::kind() const {
  switch (rep_.index()) {
    case 0: return Kind::Int;
    case 1: return Kind::Bool;
    case 2: return Kind::Unit;
    case 3: return Kind::Pair;
    default: return Kind::List;
  }
}

const BigInt& Value::as_int() const {
  if (auto* i = std::get_if<BigInt>(&rep_)) return *i;
  throw std::logic_error("value is not an integer: " + str());
}

bool Value::as_bool() const {
  if (auto* b = std::get_if<bool>(&rep_)) return *b;
  throw std::logic_error("value is not a boolean: " + str());
}

const Value& Value::first() const {
  if (auto* p = std::get_if<PairRep>(&rep_)) return (*p)->first;
  throw std::logic_error("value is not a pair: " + str());
}

const Value& Value::second() const {
  if (auto* p = std::get_if<PairRep>(&rep_)) return (*p)->second;
  throw std::logic_error("value is not a pair: " + str());
}

std::size_t Value::list_size() const {
  if (auto* l = std::get_if<ListRep>(&rep_)) return l->items->size() - l->offset;
  throw std::logic_error("value is not a list: " + str());
}

const Value& Value::list_at(std::size_t i) const {
  const auto& l = std::get<ListRep>(rep_);
  return (*l.items)[l.offset + i];
}

Value Value::list_tail() const {
  const auto* l = std::get_if<ListRep>(&rep_);
  if (!l || l->offset >= l->items->size()) throw std::logic_error("tail of empty list");
  Value v;
  v.rep_ = ListRep{l->items, l->offset + 1};
  return v;
}

bool Value::has_type(const SimpleType& t) const {
  switch (t.kind()) {
    case SimpleType::Kind::Int: return kind() == Kind::Int;
    case SimpleType::Kind::Bool: return kind() == Kind::Bool;
    case SimpleType::Kind::Unit: return kind() == Kind::Unit;
    case SimpleType::Kind::Pair:
      return kind() == Kind::Pair && first().has_type(t.left()) && second().has_type(t.right());
    case SimpleType::Kind::List:
      if (kind() != Kind::List) return false;
      for (std::size_t i = 0; i < list_size(); ++i)
        if (!list_at(i).has_type(t.elem())) return false;
      return true;
  }
  return false;
}

std::string Value::str() const {
  switch (kind()) {
    case Kind::Int: return as_int().str();
    case Kind::Bool: return as_bool() ? "true" : "false";
    case Kind::Unit: return "()";
    case Kind::Pair: return "(" + first().str() + "," + second().str() + ")";
    case Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < list_size(); ++i) {
        if (i) out += ",";
        out += list_at(i).str();
      }
      return out + "]";
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Int: return a.as_int() == b.as_int();
    case Value::Kind::Bool: return a.as_bool() == b.as_bool();
    case Value::Kind::Unit: return true;
    case Value::Kind::Pair: return a.first() == b.first() && a.second() == b.second();
    case Value::Kind::List:
      if (a.list_size() != b.list_size()) return false;
      for (std::size_t i = 0; i < a.list_size(); ++i)
        if (!(a.list_at(i) == b.list_at(i))) return false;
      return true;
  }
  return false;
}

namespace {

class ValueReader {
 public:
  explicit ValueReader(const std::string& text) : text_(text) {}

  Value read_all() {
    Value v = read();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad value literal '" + text_ + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(const std::string& w) {
    skip_ws();
    if (text_.compare(pos_, w.size(), w) == 0) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  Value read() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (eat_word("true")) return Value::boolean(true);
    if (eat_word("false")) return Value::boolean(false);
    if (eat('[')) {
      std::vector<Value> items;
      if (eat(']')) return Value::list(std::move(items));
      do {
        items.push_back(read());
      } while (eat(',') || eat(';'));
      if (!eat(']')) fail("expected ']'");
      return Value::list(std::move(items));
    }
    if (eat('(')) {
      if (eat(')')) return Value::unit();
      std::vector<Value> parts{read()};
      while (eat(',')) parts.push_back(read());
      if (!eat(')')) fail("expected ')'");
      // (a, b, c) is (a, (b, c))
      Value v = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) v = Value::pair(parts[i], v);
      return v;
    }
    std::size_t start = pos_;
    if (text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '-')) fail("expected a value");
    return Value::integer(BigInt(text_.substr(start, pos_ - start)));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Value parse_value(const std::string& text) { return ValueReader(text).read_all(); }

// ---------------------------------------------------------------------------
// Operators

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Lt: return "<";
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
  }
  return "?";
}

const char* to_string(UnOp op) { return op == UnOp::Not ? "not" : "-"; }

// ---------------------------------------------------------------------------
// Structural equality

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool same_structure(const CoreExpr& a, const CoreExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const expr::Lit& x) { return x.value == b.as<expr::Lit>()->value; },
          [&](const expr::Var& x) { return x.name == b.as<expr::Var>()->name; },
          [&](const expr::Binop& x) {
            auto& y = *b.as<expr::Binop>();
            return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
          },
          [&](const expr::Unop& x) {
            auto& y = *b.as<expr::Unop>();
            return x.op == y.op && x.arg == y.arg;
          },
          [&](const expr::App& x) {
            auto& y = *b.as<expr::App>();
            return x.fn == y.fn && x.arg == y.arg;
          },
          [&](const expr::Let& x) {
            auto& y = *b.as<expr::Let>();
            return x.binder == y.binder && same_structure(*x.bound, *y.bound) &&
                   same_structure(*x.body, *y.body);
          },
          [&](const expr::Share& x) {
            auto& y = *b.as<expr::Share>();
            return x.source == y.source && x.left == y.left && x.right == y.right &&
                   same_structure(*x.body, *y.body);
          },
          [&](const expr::Tick& x) { return x.amount == b.as<expr::Tick>()->amount; },
          [&](const expr::MkPair& x) {
            auto& y = *b.as<expr::MkPair>();
            return x.first == y.first && x.second == y.second;
          },
          [&](const expr::Nil&) { return true; },
          [&](const expr::Cons& x) {
            auto& y = *b.as<expr::Cons>();
            return x.head == y.head && x.tail == y.tail;
          },
          [&](const expr::Cond& x) {
            auto& y = *b.as<expr::Cond>();
            return x.cond == y.cond && same_structure(*x.then_branch, *y.then_branch) &&
                   same_structure(*x.else_branch, *y.else_branch);
          },
          [&](const expr::PairMatch& x) {
            auto& y = *b.as<expr::PairMatch>();
            return x.scrutinee == y.scrutinee && x.first == y.first && x.second == y.second &&
                   same_structure(*x.body, *y.body);
          },
          [&](const expr::ListMatch& x) {
            auto& y = *b.as<expr::ListMatch>();
            return x.scrutinee == y.scrutinee && x.head == y.head && x.tail == y.tail &&
                   same_structure(*x.nil_branch, *y.nil_branch) &&
                   same_structure(*x.cons_branch, *y.cons_branch);
          },
      },
      a.node);
}

// ---------------------------------------------------------------------------
// Program

const FunctionDef* Program::find(const std::string& name) const {
  for (const auto& f : functions_)
    if (f.name == name) return &f;
  return nullptr;
}

FunctionDef* Program::find(const std::string& name) {
  for (auto& f : functions_)
    if (f.name == name) return &f;
  return nullptr;
}

void Program::add(FunctionDef def) {
  if (find(def.name)) throw std::invalid_argument("duplicate function '" + def.name + "'");
  functions_.push_back(std::move(def));
}

// ---------------------------------------------------------------------------
// Free variables and use counting

namespace {

void collect_free(const CoreExpr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  auto use = [&](const std::string& x) {
    if (!bound.count(x)) out.insert(x);
  };
  auto under = [&](std::initializer_list<std::string> names, const CoreExpr& body) {
    std::vector<std::string> added;
    for (const auto& n : names)
      if (bound.insert(n).second) added.push_back(n);
    collect_free(body, bound, out);
    for (const auto& n : added) bound.erase(n);
  };
  std::visit(overloaded{
                 [&](const expr::Lit&) {},
                 [&](const expr::Var& x) { use(x.name); },
                 [&](const expr::Binop& x) { use(x.lhs), use(x.rhs); },
                 [&](const expr::Unop& x) { use(x.arg); },
                 [&](const expr::App& x) { use(x.arg); },
                 [&](const expr::Let& x) {
                   collect_free(*x.bound, bound, out);
                   under({x.binder}, *x.body);
                 },
                 [&](const expr::Share& x) {
                   use(x.source);
                   under({x.left, x.right}, *x.body);
                 },
                 [&](const expr::Tick&) {},
                 [&](const expr::MkPair& x) { use(x.first), use(x.second); },
                 [&](const expr::Nil&) {},
                 [&](const expr::Cons& x) { use(x.head), use(x.tail); },
                 [&](const expr::Cond& x) {
                   use(x.cond);
                   collect_free(*x.then_branch, bound, out);
                   collect_free(*x.else_branch, bound, out);
                 },
                 [&](const expr::PairMatch& x) {
                   use(x.scrutinee);
                   under({x.first, x.second}, *x.body);
                 },
                 [&](const expr::ListMatch& x) {
                   use(x.scrutinee);
                   collect_free(*x.nil_branch, bound, out);
                   under({x.head, x.tail}, *x.cons_branch);
                 },
             },
             e.node);
}

bool binds(std::initializer_list<const std::string*> names, const std::string& x) {
  for (auto* n : names)
    if (*n == x) return true;
  return false;
}

// Use sites of `x` in evaluation order; for branches, the branch with more uses.
void use_sites(const CoreExpr& e, const std::string& x, std::vector<Span>& out) {
  auto at = [&](const std::string& v) {
    if (v == x) out.push_back(e.span);
  };
  auto branches = [&](const CoreExpr* a, bool a_shadows, const CoreExpr* b, bool b_shadows) {
    std::vector<Span> sa, sb;
    if (!a_shadows) use_sites(*a, x, sa);
    if (!b_shadows) use_sites(*b, x, sb);
    auto& best = sa.size() >= sb.size() ? sa : sb;
    out.insert(out.end(), best.begin(), best.end());
  };
  std::visit(overloaded{
                 [&](const expr::Lit&) {},
                 [&](const expr::Var& v) { at(v.name); },
                 [&](const expr::Binop& v) { at(v.lhs), at(v.rhs); },
                 [&](const expr::Unop& v) { at(v.arg); },
                 [&](const expr::App& v) { at(v.arg); },
                 [&](const expr::Let& v) {
                   use_sites(*v.bound, x, out);
                   if (v.binder != x) use_sites(*v.body, x, out);
                 },
                 [&](const expr::Share& v) {
                   at(v.source);
                   if (!binds({&v.left, &v.right}, x)) use_sites(*v.body, x, out);
                 },
                 [&](const expr::Tick&) {},
                 [&](const expr::MkPair& v) { at(v.first), at(v.second); },
                 [&](const expr::Nil&) {},
                 [&](const expr::Cons& v) { at(v.head), at(v.tail); },
                 [&](const expr::Cond& v) {
                   at(v.cond);
                   branches(v.then_branch.get(), false, v.else_branch.get(), false);
                 },
                 [&](const expr::PairMatch& v) {
                   at(v.scrutinee);
                   if (!binds({&v.first, &v.second}, x)) use_sites(*v.body, x, out);
                 },
                 [&](const expr::ListMatch& v) {
                   at(v.scrutinee);
                   branches(v.nil_branch.get(), false, v.cons_branch.get(),
                            binds({&v.head, &v.tail}, x));
                 },
             },
             e.node);
}

std::optional<LinearityViolation> check_scope(const CoreExpr& body, const std::string& x) {
  std::vector<Span> sites;
  use_sites(body, x, sites);
  if (sites.size() <= 1) return std::nullopt;
  return LinearityViolation{x, sites[0], sites[1]};
}

std::optional<LinearityViolation> check_rec(const CoreExpr& e) {
  std::optional<LinearityViolation> found;
  auto scope = [&](const CoreExpr& body, std::initializer_list<std::string> names) {
    for (const auto& n : names) {
      if (found) return;
      if (n != "_") found = check_scope(body, n);
    }
  };
  auto sub = [&](const ExprPtr& c) {
    if (!found) found = check_rec(*c);
  };
  std::visit(overloaded{
                 [&](const expr::Let& v) {
                   scope(*v.body, {v.binder});
                   sub(v.bound);
                   sub(v.body);
                 },
                 [&](const expr::Share& v) {
                   scope(*v.body, {v.left, v.right});
                   sub(v.body);
                 },
                 [&](const expr::Cond& v) {
                   sub(v.then_branch);
                   sub(v.else_branch);
                 },
                 [&](const expr::PairMatch& v) {
                   scope(*v.body, {v.first, v.second});
                   sub(v.body);
                 },
                 [&](const expr::ListMatch& v) {
                   scope(*v.cons_branch, {v.head, v.tail});
                   sub(v.nil_branch);
                   sub(v.cons_branch);
                 },
                 [&](const auto&) {},
             },
             e.node);
  return found;
}

}  // namespace

std::set<std::string> free_vars(const CoreExpr& e) {
  std::set<std::string> bound, out;
  collect_free(e, bound, out);
  return out;
}

int use_count(const CoreExpr& e, const std::string& name) {
  std::vector<Span> sites;
  use_sites(e, name, sites);
  return static_cast<int>(sites.size());
}

std::string LinearityViolation::str() const {
  return "variable '" + variable + "' used more than once (at " + first_use.str() + " and " +
         second_use.str() + ")";
}

std::optional<LinearityViolation> check_linear(const CoreExpr& e) {
  for (const auto& x : free_vars(e))
    if (auto v = check_scope(e, x)) return v;
  return check_rec(e);
}

std::optional<LinearityViolation> check_linear(const Program& p) {
  for (const auto& f : p.functions()) {
    if (auto v = check_scope(*f.body, f.param)) return v;
    if (auto v = check_rec(*f.body)) return v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

bool is_open_ended(const CoreExpr& e) {
  return e.as<expr::Let>() || e.as<expr::Share>() || e.as<expr::Cond>() ||
         e.as<expr::PairMatch>() || e.as<expr::ListMatch>();
}

void print_rec(const CoreExpr& e, std::ostringstream& os, int indent);

void print_closed(const CoreExpr& e, std::ostringstream& os, int indent) {
  if (is_open_ended(e)) {
    os << "(";
    print_rec(e, os, indent);
    os << ")";
  } else {
    print_rec(e, os, indent);
  }
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent), ' '); }

void print_rec(const CoreExpr& e, std::ostringstream& os, int indent) {
  std::visit(overloaded{
                 [&](const expr::Lit& v) { os << v.value.str(); },
                 [&](const expr::Var& v) { os << v.name; },
                 [&](const expr::Binop& v) { os << v.lhs << " " << to_string(v.op) << " " << v.rhs; },
                 [&](const expr::Unop& v) {
                   if (v.op == UnOp::Not) os << "not " << v.arg;
                   else os << "-" << v.arg;
                 },
                 [&](const expr::App& v) { os << v.fn << " " << v.arg; },
                 [&](const expr::Let& v) {
                   if (v.binder == "_") {
                     print_closed(*v.bound, os, indent);
                     os << ";\n" << pad(indent);
                   } else {
                     os << "let " << v.binder << " = ";
                     print_closed(*v.bound, os, indent + 2);
                     os << " in\n" << pad(indent);
                   }
                   print_rec(*v.body, os, indent);
                 },
                 [&](const expr::Share& v) {
                   os << "share " << v.source << " as " << v.left << ", " << v.right << " in\n"
                      << pad(indent);
                   print_rec(*v.body, os, indent);
                 },
                 [&](const expr::Tick& v) { os << "tick " << to_string(v.amount); },
                 [&](const expr::MkPair& v) { os << "(" << v.first << ", " << v.second << ")"; },
                 [&](const expr::Nil&) { os << "[]"; },
                 [&](const expr::Cons& v) { os << v.head << " :: " << v.tail; },
                 [&](const expr::Cond& v) {
                   os << "if " << v.cond << " then ";
                   print_closed(*v.then_branch, os, indent + 2);
                   os << " else ";
                   print_closed(*v.else_branch, os, indent + 2);
                 },
                 [&](const expr::PairMatch& v) {
                   os << "match " << v.scrutinee << " with\n"
                      << pad(indent) << "| (" << v.first << ", " << v.second << ") ->\n"
                      << pad(indent + 2);
                   print_rec(*v.body, os, indent + 2);
                 },
                 [&](const expr::ListMatch& v) {
                   os << "match " << v.scrutinee << " with\n" << pad(indent) << "| [] -> ";
                   print_closed(*v.nil_branch, os, indent + 2);
                   os << "\n"
                      << pad(indent) << "| " << v.head << " :: " << v.tail << " ->\n"
                      << pad(indent + 2);
                   print_rec(*v.cons_branch, os, indent + 2);
                 },
             },
             e.node);
}

}  // namespace

std::string print_expr(const CoreExpr& e) {
  std::ostringstream os;
  print_rec(e, os, 2);
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& f : p.functions()) {
    os << "let " << f.name << " " << f.param << " =\n  ";
    print_rec(*f.body, os, 2);
    os << "\n\n";
  }
  return os.str();
}

}  // namespace aara
