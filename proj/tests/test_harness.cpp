#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "aara/frontend.hpp"
#include "aara/harness.hpp"

using namespace aara;

namespace {

Program corpus(const std::string& name) {
  return load_program(std::string(AARA_CORPUS_DIR) + "/" + name + ".aex");
}

const SimpleType kInts = SimpleType::list(SimpleType::integer());

FunctionReport inferred(const std::string& name, const BasisConfig& cfg) {
  Analysis a = analyze(corpus(name), cfg);
  REQUIRE(a.outcome.optimal());
  AnalysisReport r = make_report(a);
  for (auto& f : r.functions)
    if (f.function == name) return f;
  FAIL("missing " << name);
  throw 0;
}

// subSum1 with a hand-written signature: the analysis itself cannot type remove.
FunctionReport sub_sum1(const BasisConfig& cfg, std::vector<Rational> ann) {
  FunctionReport f;
  f.function = "subSum1";
  f.cfg = cfg;
  f.arg_type = zero_annotated(cfg, SimpleType::pair(kInts, SimpleType::integer()));
  f.arg_type.children[0].ann = std::move(ann);
  f.result_type = zero_annotated(cfg, SimpleType::boolean());
  f.q = 1;
  f.q_prime = 0;
  return f;
}

std::vector<Value> distinct_lists(int max_n, int target) {
  std::vector<Value> out;
  for (int n = 0; n <= max_n; ++n) {
    std::vector<Value> items;
    for (int i = 0; i < n; ++i) items.push_back(Value::integer(3 * i - n));
    out.push_back(Value::pair(Value::list(items), Value::integer(target)));
  }
  return out;
}

}  // namespace

TEST_CASE("tiny exhaustive enumeration") {
  EnumOptions o;
  o.max_size = 1;
  o.lo = 0;
  o.hi = 1;
  auto v = enumerate_inputs(kInts, o);
  REQUIRE(v.size() == 3);
  CHECK(v[0].str() == "[]");
  CHECK(v[1].str() == "[0]");
  CHECK(v[2].str() == "[1]");

  auto pairs = enumerate_inputs(SimpleType::pair(kInts, SimpleType::integer()), o);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0].str() == "([],0)");
  CHECK(pairs[5].str() == "([1],1)");
}

TEST_CASE("exhaustive lists are complete and distinct") {
  EnumOptions o;
  o.max_size = 3;
  o.lo = -1;
  o.hi = 1;
  auto v = enumerate_inputs(kInts, o);
  CHECK(v.size() == 1 + 3 + 9 + 27);
  std::set<std::string> seen;
  for (const auto& x : v) seen.insert(x.str());
  CHECK(seen.size() == v.size());
}

TEST_CASE("sampling is seeded") {
  EnumOptions o;
  o.max_size = 12;
  o.exhaustive_limit = 100;
  o.samples = 50;
  auto a = enumerate_inputs(kInts, o);
  auto b = enumerate_inputs(kInts, o);
  CHECK(a == b);
  o.seed = 2;
  CHECK(enumerate_inputs(kInts, o) != a);
  // Lengths 0..2 are exhaustive (7^2 = 49), 3..12 sampled.
  CHECK(a.size() == 1 + 7 + 49 + 10 * 50);
  for (const auto& x : a) CHECK(x.list_size() <= 12);
}

TEST_CASE("subsetSum bound is sound and tight") {
  FunctionReport sig = inferred("subsetSum", BasisConfig::stirling(1));
  EnumOptions o;
  o.max_size = 8;
  o.lo = -3;
  o.hi = 3;
  o.exhaustive_limit = 2401;
  o.samples = 200;
  auto inputs = enumerate_inputs(SimpleType::pair(kInts, SimpleType::integer()), o);
  BoundCheckReport r = check_bound(corpus("subsetSum"), "subsetSum", sig, inputs);
  CHECK(r.ok());
  CHECK(r.exhausted == 0);
  CHECK(r.checked == inputs.size());
  CHECK(*r.max_slack == 0);
  CHECK(r.tight.size() == inputs.size());
}

TEST_CASE("snoc bound is tight") {
  FunctionReport sig = inferred("snoc", BasisConfig::binomial(1));
  EnumOptions o;
  o.max_size = 64;
  o.exhaustive_limit = 512;
  o.samples = 4;
  auto inputs = enumerate_inputs(SimpleType::pair(SimpleType::integer(), kInts), o);
  BoundCheckReport r = check_bound(corpus("snoc"), "snoc", sig, inputs);
  CHECK(r.ok());
  CHECK(*r.min_slack == 0);
  CHECK(*r.max_slack == 0);
}

TEST_CASE("subSum1 with the printed signatures") {
  Program p = corpus("subSum1");
  auto inputs = distinct_lists(9, 1);

  // Without demotion the bound is loose once the list has two elements.
  BoundCheckReport loose = check_bound(p, "subSum1", sub_sum1(BasisConfig::mixed(1, 1), {0, 2, 1}), inputs);
  CHECK(loose.ok());
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    CAPTURE(n);
    CHECK(loose.inputs[n].slack >= 0);
    if (n >= 2) CHECK(loose.inputs[n].slack > 0);
  }

  // With demotion it is exact on duplicate-free input.
  BoundCheckReport exact = check_bound(p, "subSum1", sub_sum1(BasisConfig::mixed(1, 1, true), {-1, 4, 0}), inputs);
  CHECK(exact.ok());
  CHECK(exact.tight.size() == inputs.size());

  // Duplicates only make remove shrink the list faster.
  EnumOptions o;
  o.max_size = 7;
  o.lo = 0;
  o.hi = 2;
  auto dup = enumerate_inputs(SimpleType::pair(kInts, SimpleType::integer()), o);
  CHECK(check_bound(p, "subSum1", sub_sum1(BasisConfig::mixed(1, 1, true), {-1, 4, 0}), dup).ok());
}

TEST_CASE("weakening a signature only adds slack") {
  FunctionReport sig = inferred("subsetSum", BasisConfig::stirling(1));
  auto inputs = distinct_lists(8, 0);
  BoundCheckReport base = check_bound(corpus("subsetSum"), "subsetSum", sig, inputs);
  sig.arg_type.children[0].ann[0] += 1;
  sig.q += Rational(1, 2);
  BoundCheckReport weak = check_bound(corpus("subsetSum"), "subsetSum", sig, inputs);
  CHECK(weak.ok());
  for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(weak.inputs[i].slack > base.inputs[i].slack);
}

TEST_CASE("an undersized signature is caught") {
  FunctionReport sig = inferred("subsetSum", BasisConfig::stirling(1));
  sig.arg_type.children[0].ann[0] = 2;
  BoundCheckReport r = check_bound(corpus("subsetSum"), "subsetSum", sig, distinct_lists(5, 0));
  CHECK_FALSE(r.ok());
  // n = 0 still fits; every longer list overruns.
  CHECK(r.violations == 5);
  CHECK_FALSE(r.inputs[0].violation);
}

TEST_CASE("fuel exhaustion is reported and excluded") {
  Program p = corpus("loop");
  FunctionReport sig;
  sig.function = "loop";
  sig.cfg = BasisConfig::stirling(1);
  sig.arg_type = zero_annotated(sig.cfg, SimpleType::integer());
  sig.result_type = sig.arg_type;
  sig.q = 1;
  BoundCheckReport r = check_bound(p, "loop", sig, {Value::integer(-5), Value::integer(3)}, 1000);
  CHECK(r.exhausted == 1);
  CHECK(r.checked == 1);
  CHECK(r.inputs[1].exhausted);
  CHECK(r.ok());
  CHECK(r.summary().find("1 out of fuel") != std::string::npos);
}

TEST_CASE("thread count does not change results") {
  FunctionReport sig = inferred("subsetSum", BasisConfig::stirling(1));
  EnumOptions o;
  o.max_size = 5;
  o.lo = -1;
  o.hi = 1;
  auto inputs = enumerate_inputs(SimpleType::pair(kInts, SimpleType::integer()), o);
  BoundCheckReport one = check_bound(corpus("subsetSum"), "subsetSum", sig, inputs, 1'000'000, 1);
  BoundCheckReport many = check_bound(corpus("subsetSum"), "subsetSum", sig, inputs, 1'000'000, 4);
  REQUIRE(one.inputs.size() == many.inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    CHECK(one.inputs[i].input == many.inputs[i].input);
    CHECK(one.inputs[i].slack == many.inputs[i].slack);
  }
  CHECK(one.summary() == many.summary());
}
