#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "aara/eval.hpp"
#include "aara/frontend.hpp"

using namespace aara;

namespace {

Program corpus(const std::string& name) {
  return load_program(std::string(AARA_CORPUS_DIR) + "/" + name + ".aex");
}

Value ints(const std::vector<int>& xs) {
  std::vector<Value> items;
  for (int x : xs) items.push_back(Value::integer(x));
  return Value::list(items);
}

// Cost recurrence read off the subsetSum listing: C(0) = 1, C(n) = 2 + 2·C(n−1).
Rational subset_sum_cost(int n) { return n == 0 ? Rational(1) : 2 + 2 * subset_sum_cost(n - 1); }

constexpr std::uint64_t kFuel = 10'000'000;

}  // namespace

TEST_CASE("composition spot check") {
  ResourcePair r = compose({2, 1}, {3, 0});
  CHECK(r.q == 4);
  CHECK(r.q_out == 0);
}

TEST_CASE("composition is associative") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(0, 6);
  for (int i = 0; i < 500; ++i) {
    ResourcePair a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)};
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
  }
}

TEST_CASE("a negative tick alone returns resources") {
  Program empty;
  CostOutcome r = eval_expr(empty, make_expr(expr::Tick{Rational(-1)}), {}, 10);
  CHECK(r.q == 0);
  CHECK(r.q_out == 1);
  CHECK(r.value == Value::unit());
}

TEST_CASE("snoc appends and costs one per element plus one") {
  Program p = corpus("snoc");
  CostOutcome r = eval(p, "snoc", Value::pair(Value::integer(9), ints({1, 2})), kFuel);
  CHECK(r.value == ints({1, 2, 9}));
  CHECK(r.q == 3);
  CHECK(r.q_out == 0);
}

TEST_CASE("subsetSum follows its cost recurrence") {
  Program p = corpus("subsetSum");
  CostOutcome r = eval(p, "subsetSum", Value::pair(ints({1, 2}), Value::integer(3)), kFuel);
  CHECK(r.value == Value::boolean(true));
  CHECK(r.q == 10);
  for (int n = 0; n <= 8; ++n) {
    std::vector<int> xs(n, 1);
    CostOutcome c = eval(p, "subsetSum", Value::pair(ints(xs), Value::integer(0)), kFuel);
    CHECK(c.q == subset_sum_cost(n));
    CHECK(c.q_out == 0);
  }
}

TEST_CASE("subsetSum answers correctly") {
  Program p = corpus("subsetSum");
  CHECK(eval(p, "subsetSum", Value::pair(ints({3, 5, 7}), Value::integer(12)), kFuel).value ==
        Value::boolean(true));
  CHECK(eval(p, "subsetSum", Value::pair(ints({3, 5, 7}), Value::integer(4)), kFuel).value ==
        Value::boolean(false));
}

TEST_CASE("ballBins3 enumerates 3^n placements") {
  Program p = corpus("ballBins3");
  for (int n = 0; n <= 5; ++n) {
    std::vector<int> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = i;
    CostOutcome r = eval(p, "ballBins3", ints(xs), kFuel);
    std::size_t expected = 1;
    for (int i = 0; i < n; ++i) expected *= 3;
    CHECK(r.value.list_size() == expected);
    CHECK(r.q == Rational(expected));
  }
}

TEST_CASE("subSum1 cost on distinct input") {
  Program p = corpus("subSum1");
  for (int n = 0; n <= 7; ++n) {
    std::vector<int> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = i + 1;
    CostOutcome r = eval(p, "subSum1", Value::pair(ints(xs), Value::integer(-1)), kFuel);
    // Independent count: remove on a list of length m costs m; the driver
    // spends 2 per cons node plus 1 per leaf.
    std::function<Rational(int)> cost = [&](int m) -> Rational {
      return m == 0 ? Rational(1) : Rational(m - 1) + 2 + 2 * cost(m - 1);
    };
    CHECK(r.q == cost(n));
    Rational pow2 = 1;
    for (int i = 0; i < n; ++i) pow2 *= 2;
    CHECK(r.q == 4 * pow2 - n - 3);
  }
}

TEST_CASE("log halves") {
  Program p = corpus("log");
  CostOutcome r = eval(p, "logOf", Value::integer(16), kFuel);
  CHECK(r.value == Value::integer(5));
}

TEST_CASE("watermark with zero fuel is zero") {
  Program p = corpus("subsetSum");
  PartialOutcome w = watermark(p, "subsetSum", Value::pair(ints({1, 2}), Value::integer(0)), 0);
  CHECK(w.watermark == 0);
  CHECK(w.exhausted);
}

TEST_CASE("watermark agrees with eval when evaluation terminates") {
  Program p = corpus("subsetSum");
  Value arg = Value::pair(ints({1, 2, 3}), Value::integer(0));
  PartialOutcome w = watermark(p, "subsetSum", arg, kFuel);
  CHECK_FALSE(w.exhausted);
  CHECK(w.watermark == 22);
  CHECK(w.watermark == eval(p, "subsetSum", arg, kFuel).q);
}

TEST_CASE("watermark is monotone in fuel") {
  Program p = corpus("subsetSum");
  Value arg = Value::pair(ints({1, 2, 3, 4}), Value::integer(0));
  Rational prev = 0;
  for (std::uint64_t f = 0; f < 400; f += 7) {
    Rational w = watermark(p, "subsetSum", arg, f).watermark;
    CHECK(prev <= w);
    prev = w;
  }
}

TEST_CASE("the divergent loop keeps climbing") {
  Program p = corpus("loop");
  PartialOutcome small = watermark(p, "loop", Value::integer(0), 1000);
  PartialOutcome large = watermark(p, "loop", Value::integer(0), kFuel);
  CHECK(small.exhausted);
  CHECK(large.exhausted);
  CHECK(small.watermark < large.watermark);
  CHECK_THROWS_AS(eval(p, "loop", Value::integer(0), 1000), FuelExhausted);
}

TEST_CASE("share erasure leaves results unchanged") {
  // Same program with and without automatic shares.
  const std::string src = "let f xs = match xs with | [] -> 0 | h :: t -> tick 1; h + h + f t";
  Program shared = elaborate(src);
  Program raw = infer_simple_types(let_normalize(parse(src)));
  for (int n = 0; n < 6; ++n) {
    std::vector<int> xs(n, n);
    CostOutcome a = eval(shared, "f", ints(xs), kFuel);
    CostOutcome b = eval(raw, "f", ints(xs), kFuel);
    CHECK(a.value == b.value);
    CHECK(a.q == b.q);
    CHECK(a.q_out == b.q_out);
  }
}

TEST_CASE("ill-typed arguments are refused") {
  Program p = corpus("snoc");
  CHECK_THROWS_AS(eval(p, "snoc", Value::integer(3), kFuel), RuntimeError);
  CHECK_THROWS_AS(eval(p, "nope", Value::integer(3), kFuel), RuntimeError);
}
