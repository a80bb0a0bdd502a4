#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "aara/constraints.hpp"

namespace aara {

struct SolverStats {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::uint64_t pivots = 0;
  double seconds = 0;

  friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

struct FunctionReport {
  std::string function;
  BasisConfig cfg;
  AnnotatedType arg_type;
  AnnotatedType result_type;
  Rational q;
  Rational q_prime;
  std::string closed_form;
  SolverStats stats;

  friend bool operator==(const FunctionReport&, const FunctionReport&) = default;
};

struct AnalysisReport {
  std::vector<FunctionReport> functions;  // source order

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// A top-level list of an argument: its size variable and where it sits.
struct SizeVariable {
  std::string name;  // n, or n₁, n₂, … when there are several lists
  std::string path;  // arg, arg.1, arg.2.1, …
  const AnnotatedType* type = nullptr;
};

/// Lists reachable from `arg` through tuples, numbered left to right.
std::vector<SizeVariable> size_variables(const AnnotatedType& arg);

/// q plus the potential of every top-level list in `arg`, one variable per list.
ClosedForm bound_closed_form(const BasisConfig& cfg, const AnnotatedType& arg, const Rational& q);

/// Requires an Optimal analysis. Throws std::logic_error when a rendered
/// bound disagrees with q + φ at some n in 0..20.
AnalysisReport make_report(const Analysis& a);

enum class ReportFormat { Text, Json };

std::string render_report(const AnalysisReport& r, ReportFormat format);
std::string render_signature_line(const FunctionReport& f);

nlohmann::json report_json(const AnalysisReport& r);
nlohmann::json function_json(const FunctionReport& f);
nlohmann::json annotated_type_json(const BasisConfig& cfg, const AnnotatedType& t);
AnnotatedType annotated_type_from_json(const BasisConfig& cfg, const nlohmann::json& j);
/// Throws std::invalid_argument (or nlohmann::json::exception) on malformed input.
AnalysisReport parse_report_json(const std::string& text);

}  // namespace aara
