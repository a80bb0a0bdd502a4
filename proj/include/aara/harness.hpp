#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aara/eval.hpp"
#include "aara/report.hpp"

namespace aara {

struct EnumOptions {
  std::size_t max_size = 8;  // longest list
  BigInt lo = -3;            // integer elements range over [lo, hi]
  BigInt hi = 3;
  /// A list length (or a tuple product) with more values than this is sampled.
  std::size_t exhaustive_limit = 4096;
  std::size_t samples = 1024;
  std::uint64_t seed = 1;
};

/// Deterministic for fixed options: every list length up to max_size, all
/// element combinations while they fit under exhaustive_limit, seeded samples
/// beyond that.
std::vector<Value> enumerate_inputs(const SimpleType& t, const EnumOptions& opts);

struct InputCheck {
  Value input;
  bool exhausted = false;       // fuel ran out; excluded from the summary
  std::string error;            // runtime error; counted as a violation
  ResourcePair measured;
  Rational bound;               // Φ(input) + q
  Rational net_bound;           // Φ(input) + q − Φ(output) − q'
  Rational slack;               // bound − measured.q
  bool violation = false;
};

struct BoundCheckReport {
  std::string function;
  std::vector<InputCheck> inputs;  // input order
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t exhausted = 0;
  std::optional<Rational> min_slack;
  std::optional<Rational> max_slack;
  std::vector<std::size_t> tight;  // inputs with slack 0

  bool ok() const { return violations == 0; }
  std::string summary() const;
};

/// Runs every input through the cost semantics and checks both soundness
/// inequalities against `sig`. Inputs are spread over `threads` workers
/// (0 picks the hardware count); results keep input order.
BoundCheckReport check_bound(const Program& p, const std::string& function, const FunctionReport& sig,
                             const std::vector<Value>& inputs, std::uint64_t fuel = 10'000'000,
                             unsigned threads = 0);

}  // namespace aara
