#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aara/ast.hpp"

namespace aara {

/// A resource pair (q, q'): high-water mark and leftover.
struct ResourcePair {
  Rational q = 0;
  Rational q_out = 0;
  friend bool operator==(const ResourcePair&, const ResourcePair&) = default;
};

/// Sequential composition: first `a`, then `b`.
ResourcePair compose(const ResourcePair& a, const ResourcePair& b);

/// The pair charged by `tick r`.
ResourcePair tick_pair(const Rational& r);

struct CostOutcome {
  Value value;
  Rational q;
  Rational q_out;
  std::uint64_t steps = 0;
};

struct PartialOutcome {
  Rational watermark;
  bool exhausted = false;
};

class FuelExhausted : public std::runtime_error {
 public:
  explicit FuelExhausted(PartialOutcome partial);
  const PartialOutcome& partial() const { return partial_; }

 private:
  PartialOutcome partial_;
};

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(const std::string& message, Span span);
  Span span() const { return span_; }

 private:
  Span span_;
};

using Bindings = std::vector<std::pair<std::string, Value>>;

/// Evaluates `entry` on `arg`. Each rule application costs one unit of fuel.
/// Throws FuelExhausted or RuntimeError.
CostOutcome eval(const Program& p, const std::string& entry, const Value& arg, std::uint64_t fuel);

/// Evaluates an expression under explicit bindings; functions resolve in `p`.
CostOutcome eval_expr(const Program& p, const ExprPtr& e, const Bindings& env, std::uint64_t fuel);

/// High-water mark of the evaluation prefix that fits in `fuel`. Never throws
/// FuelExhausted.
PartialOutcome watermark(const Program& p, const std::string& entry, const Value& arg,
                         std::uint64_t fuel);

}  // namespace aara
