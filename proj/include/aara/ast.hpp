#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aara/rational.hpp"

namespace aara {

struct Span {
  int line = 0;
  int column = 0;
  std::string str() const;
  friend bool operator==(const Span&, const Span&) = default;
};

// ---------------------------------------------------------------------------
// Simple (annotation-free) types.

class SimpleType {
 public:
  enum class Kind { Int, Bool, Unit, List, Pair };

  static SimpleType integer() { return SimpleType(Kind::Int); }
  static SimpleType boolean() { return SimpleType(Kind::Bool); }
  static SimpleType unit() { return SimpleType(Kind::Unit); }
  static SimpleType list(SimpleType elem);
  static SimpleType pair(SimpleType left, SimpleType right);

  Kind kind() const { return kind_; }
  bool is_basic() const { return kind_ == Kind::Int || kind_ == Kind::Bool || kind_ == Kind::Unit; }
  bool is_list() const { return kind_ == Kind::List; }
  bool is_pair() const { return kind_ == Kind::Pair; }
  const SimpleType& elem() const;
  const SimpleType& left() const;
  const SimpleType& right() const;

  /// `int`, `int list`, `(int × int list)`.
  std::string str() const;

  friend bool operator==(const SimpleType& a, const SimpleType& b);

 private:
  explicit SimpleType(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::shared_ptr<const SimpleType> first_;
  std::shared_ptr<const SimpleType> second_;
};

// ---------------------------------------------------------------------------
// Runtime values. Lists are stored as a shared sequence plus an offset so
// taking the tail is O(1); index 0 of the view is the head.

class Value {
 public:
  enum class Kind { Int, Bool, Unit, Pair, List };

  static Value integer(BigInt i);
  static Value boolean(bool b);
  static Value unit();
  static Value pair(Value first, Value second);
  static Value list(std::vector<Value> items);
  static Value nil() { return list({}); }
  /// Builds `head :: tail`. Copies the tail's items.
  static Value cons(const Value& head, const Value& tail);

  Kind kind() const;
  const BigInt& as_int() const;
  bool as_bool() const;
  const Value& first() const;
  const Value& second() const;
  std::size_t list_size() const;
  const Value& list_at(std::size_t i) const;
  Value list_tail() const;

  bool has_type(const SimpleType& t) const;
  /// Literal syntax accepted by `parse_value`: `[1,2]`, `(1,[2])`, `true`, `()`.
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  struct ListRep {
    std::shared_ptr<const std::vector<Value>> items;
    std::size_t offset = 0;
  };
  using PairRep = std::shared_ptr<const std::pair<Value, Value>>;
  std::variant<BigInt, bool, std::monostate, PairRep, ListRep> rep_;
};

/// Parses a value literal (CLI input syntax). Throws std::invalid_argument.
Value parse_value(const std::string& text);

// ---------------------------------------------------------------------------
// Let-normal core expressions.

enum class BinOp { Add, Sub, Mul, Eq, Lt, Or, And };
enum class UnOp { Not, Neg };

const char* to_string(BinOp op);
const char* to_string(UnOp op);

struct CoreExpr;
using ExprPtr = std::shared_ptr<const CoreExpr>;

namespace expr {
struct Lit { Value value; };
struct Var { std::string name; };
struct Binop { BinOp op; std::string lhs; std::string rhs; };
struct Unop { UnOp op; std::string arg; };
struct App { std::string fn; std::string arg; };
/// `binder == "_"` for sequencing. `binder_type` is filled in by simple-type inference.
struct Let {
  ExprPtr bound;
  std::string binder;
  ExprPtr body;
  std::optional<SimpleType> binder_type;
};
struct Share { std::string source; std::string left; std::string right; ExprPtr body; };
struct Tick { Rational amount; };
struct MkPair { std::string first; std::string second; };
struct Nil {};
struct Cons { std::string head; std::string tail; };
struct Cond { std::string cond; ExprPtr then_branch; ExprPtr else_branch; };
struct PairMatch { std::string scrutinee; std::string first; std::string second; ExprPtr body; };
struct ListMatch {
  std::string scrutinee;
  ExprPtr nil_branch;
  std::string head;
  std::string tail;
  ExprPtr cons_branch;
};
}  // namespace expr

struct CoreExpr {
  using Node = std::variant<expr::Lit, expr::Var, expr::Binop, expr::Unop, expr::App, expr::Let,
                            expr::Share, expr::Tick, expr::MkPair, expr::Nil, expr::Cons,
                            expr::Cond, expr::PairMatch, expr::ListMatch>;
  Node node;
  Span span;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
};

template <class T>
ExprPtr make_expr(T node, Span span = {}) {
  return std::make_shared<const CoreExpr>(CoreExpr{CoreExpr::Node(std::move(node)), span});
}

/// Structural equality; spans and inferred binder types are ignored.
bool same_structure(const CoreExpr& a, const CoreExpr& b);

struct FunctionDef {
  std::string name;
  std::string param;
  ExprPtr body;
  std::optional<SimpleType> param_type;
  std::optional<SimpleType> result_type;
  Span span;
};

class Program {
 public:
  const std::vector<FunctionDef>& functions() const { return functions_; }
  std::vector<FunctionDef>& functions() { return functions_; }
  const FunctionDef* find(const std::string& name) const;
  FunctionDef* find(const std::string& name);
  /// Throws std::invalid_argument on a duplicate name.
  void add(FunctionDef def);
  bool empty() const { return functions_.empty(); }

 private:
  std::vector<FunctionDef> functions_;
};

// ---------------------------------------------------------------------------
// Binding-structure utilities.

std::set<std::string> free_vars(const CoreExpr& e);

/// Number of uses of free variable `name` in `e`, counting alternative branches
/// by their maximum and sequential positions by their sum.
int use_count(const CoreExpr& e, const std::string& name);

struct LinearityViolation {
  std::string variable;
  Span first_use;
  Span second_use;
  std::string str() const;
};

/// Empty when every variable is used at most once per scope.
std::optional<LinearityViolation> check_linear(const CoreExpr& e);
std::optional<LinearityViolation> check_linear(const Program& p);

/// Canonical printer; `parse` followed by `let_normalize` reproduces the tree.
std::string print_expr(const CoreExpr& e);
std::string print_program(const Program& p);

}  // namespace aara
