#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aara/rational.hpp"

namespace aara {

/// Σ coeff·x_var + constant, over variable ids.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(Rational constant) : constant_(std::move(constant)) {}  // NOLINT(implicit)
  static LinExpr var(std::size_t id, Rational coeff = 1);

  const std::map<std::size_t, Rational>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }

  LinExpr& add(std::size_t id, const Rational& coeff);
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(const Rational& k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(const Rational& k, LinExpr a) { return a *= k; }

  Rational evaluate(const std::vector<Rational>& values) const;

 private:
  std::map<std::size_t, Rational> terms_;
  Rational constant_ = 0;
};

enum class Relation { Ge, Le, Eq };
const char* to_string(Relation r);

/// `expr rel 0`.
struct LpRow {
  LinExpr expr;
  Relation rel = Relation::Ge;
  std::string name;
};

struct LpVariable {
  std::string name;
  bool free = false;  // lower bound −∞ instead of 0
};

class StandardFormLp {
 public:
  std::size_t add_variable(std::string name, bool free = false);
  std::size_t add_row(LinExpr expr, Relation rel, std::string name = {});

  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  std::size_t find_variable(const std::string& name) const;  // npos when absent

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Rows violated by `values` (exact check). Free-ness is respected.
  std::vector<std::size_t> violations(const std::vector<Rational>& values) const;

 private:
  std::vector<LpVariable> vars_;
  std::vector<LpRow> rows_;
  std::map<std::string, std::size_t> by_name_;
};

struct LpStats {
  std::size_t variables = 0;
  std::size_t rows = 0;
  std::uint64_t pivots = 0;
};

struct LpOutcome {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  std::vector<Rational> values;       // Optimal
  Rational objective;                  // Optimal
  std::vector<std::size_t> certificate;  // Infeasible: rows with a nonzero Farkas multiplier
  std::vector<Rational> ray;           // Unbounded: improving direction
  LpStats stats;

  bool optimal() const { return status == Status::Optimal; }
};

const char* to_string(LpOutcome::Status s);

/// Exact two-phase primal simplex with Bland's rule. Minimizes `objective`.
LpOutcome solve(const StandardFormLp& lp, const LinExpr& objective);

/// Minimizes each objective in turn, pinning every achieved optimum before the next.
LpOutcome lexicographic_solve(const StandardFormLp& lp, const std::vector<LinExpr>& objectives);

/// `min: 3 x + y;` then `name: 2 x - y >= 1;` rows, then `free: a, b;`.
std::string emit_lp_text(const StandardFormLp& lp, const LinExpr& objective);

struct ParsedLp {
  StandardFormLp lp;
  LinExpr objective;
};
/// Throws std::invalid_argument on malformed input.
ParsedLp parse_lp_text(const std::string& text);

}  // namespace aara
