#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aara/ast.hpp"

namespace aara {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  Span span;
  std::string str() const;
};

/// Carries every diagnostic of a failed frontend phase.
class FrontendError : public std::runtime_error {
 public:
  explicit FrontendError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// ---------------------------------------------------------------------------
// Surface syntax

struct SurfaceExpr;
using SurfacePtr = std::shared_ptr<const SurfaceExpr>;

struct MatchArm {
  enum class Pattern { Nil, Cons, Tuple, Literal, Bind };
  Pattern pattern = Pattern::Bind;
  std::vector<std::string> names;  // Cons: head, tail. Tuple: components. Bind: the name or "_".
  std::optional<Value> literal;
  SurfacePtr body;
  Span span;
};

struct SurfaceExpr {
  enum class Kind { Var, Lit, Tick, App, Binop, Unop, Tuple, ListLit, Cons, Append, Let, Seq, If, Match, Share };
  Kind kind = Kind::Var;
  Span span;
  std::string name;                 // Var, App (function), Let (binder)
  std::optional<Value> literal;     // Lit
  Rational tick;                    // Tick
  BinOp binop = BinOp::Add;
  UnOp unop = UnOp::Not;
  std::vector<SurfacePtr> children; // operands, arguments, elements, sub-expressions in source order
  std::vector<MatchArm> arms;       // Match
  std::vector<std::string> share_names;  // Share: source, left, right
};

struct SurfaceFunction {
  std::string name;
  std::vector<std::string> params;
  SurfacePtr body;
  Span span;
};

struct SurfaceProgram {
  std::vector<SurfaceFunction> functions;
};

/// Throws FrontendError on syntax errors or duplicate function names.
SurfaceProgram parse(const std::string& source);

/// Hoists compound operands into fresh lets, preserving left-to-right
/// call-by-value order. Fresh names have the form `_#N`. Throws FrontendError
/// on malformed matches or call arity mismatches.
ExprPtr let_normalize(const SurfaceExpr& e);
Program let_normalize(const SurfaceProgram& p);

/// Makes every scope linear by inserting `share` nodes at the lowest node that
/// dominates all uses of a variable. Copies are named `x#1, x#2, ...`.
ExprPtr insert_shares(const ExprPtr& e);
Program insert_shares(const Program& p);

/// Unification-based monomorphic inference. Fills function parameter/result
/// types and every let binder type. Throws FrontendError.
Program infer_simple_types(const Program& p);

/// parse, let_normalize, insert_shares, infer_simple_types.
Program elaborate(const std::string& source);
Program load_program(const std::string& path);

}  // namespace aara
