#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aara/ast.hpp"
#include "aara/lp.hpp"
#include "aara/potential.hpp"

namespace aara {

/// An annotation variable is an LP variable id.
using AnnVar = std::size_t;
using VarType = Annotated<AnnVar>;
using ExprType = Annotated<LinExpr>;

struct FunSig {
  std::string name;
  VarType arg;
  VarType result;
  AnnVar q_in = 0;
  AnnVar q_out = 0;
};

/// Where a constraint row came from.
struct Provenance {
  std::string function;
  Span span;
  std::string rule;
  std::string callee;  // set on rows generated at a call site
};

struct RecursiveCall {
  std::string caller;
  std::string callee;
  Span span;
};

struct ConstraintSystem {
  BasisConfig cfg;
  StandardFormLp lp;
  std::vector<Provenance> origin;  // one per LP row
  std::map<std::string, FunSig> sigs;
  std::vector<std::string> functions;  // source order
  std::string entry;
  std::vector<RecursiveCall> recursive_calls;
  std::set<std::string> external_callees;  // called from outside their own recursion
  std::vector<LinExpr> objectives;  // primary, then tie-break
};

/// Creates one resource-monomorphic signature per function.
void annotate_skeleton(const Program& p, ConstraintSystem& sys);

/// Builds the full system for `p`. `entry` defaults to the last function.
/// Throws std::invalid_argument on an unknown entry or an invalid config.
ConstraintSystem gen_constraints(const Program& p, const BasisConfig& cfg, const std::string& entry = {});

/// Primary objective (entry input coefficients weighted 10^4 per growth rank,
/// plus q_in) and the tie-break sum over all annotation variables.
std::vector<LinExpr> build_objective(const ConstraintSystem& sys);

struct SolvedSig {
  AnnotatedType arg;
  AnnotatedType result;
  Rational q_in;
  Rational q_out;
};

struct Analysis {
  ConstraintSystem system;
  LpOutcome outcome;
  std::map<std::string, SolvedSig> sigs;  // Optimal only
  std::string diagnosis;                  // Infeasible / Unbounded only
  double seconds = 0;
};

Analysis analyze(const Program& p, const BasisConfig& cfg, const std::string& entry = {});

SolvedSig substitute(const FunSig& sig, const std::vector<Rational>& values);

/// Explains an infeasibility certificate in source terms, naming recursive
/// calls that constrain a shared signature.
std::string explain_infeasibility(const ConstraintSystem& sys, const LpOutcome& outcome);

struct WitnessCheck {
  bool feasible = false;
  std::vector<std::string> unknown;  // names in `fixed` absent from the system
  LpOutcome outcome;
};

/// Pins the named variables and asks whether the rest of the system can be
/// completed. With `only_function`, rows from other functions are dropped.
WitnessCheck check_witness(const ConstraintSystem& sys, const std::map<std::string, Rational>& fixed,
                           const std::optional<std::string>& only_function = std::nullopt);

/// Names of the LP variables of a signature component, in annotation order,
/// one vector per list node (preorder).
std::vector<std::vector<std::string>> list_variable_names(const ConstraintSystem& sys, const VarType& t);

}  // namespace aara
