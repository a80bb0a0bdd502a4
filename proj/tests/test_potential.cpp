#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aara/potential.hpp"

using namespace aara;

namespace {

// Brute-force Stirling numbers: count set partitions by restricted growth strings.
long long count_partitions(int n, int k) {
  if (n == 0) return k == 0 ? 1 : 0;
  std::vector<int> a(n, 0);
  long long count = 0;
  for (;;) {
    int blocks = 1 + *std::max_element(a.begin(), a.end());
    if (blocks == k) ++count;
    int i = n - 1;
    for (; i > 0; --i) {
      int m = *std::max_element(a.begin(), a.begin() + i);
      if (a[i] <= m) {
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
        break;
      }
    }
    if (i == 0) return count;
  }
}

Annotation ann(std::initializer_list<int> xs) {
  Annotation out;
  for (int x : xs) out.push_back(Rational(x));
  return out;
}

std::vector<BasisConfig> all_configs(int max_degree) {
  std::vector<BasisConfig> out;
  for (int d = 1; d <= max_degree; ++d) {
    out.push_back(BasisConfig::binomial(d));
    out.push_back(BasisConfig::stirling(d));
    for (int e = 1; e <= max_degree; ++e) out.push_back(BasisConfig::mixed(d, e));
  }
  return out;
}

Annotation random_annotation(const BasisConfig& cfg, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(0, 12);
  std::uniform_int_distribution<int> den(1, 5);
  Annotation p;
  for (std::size_t i = 0; i < basis_size(cfg); ++i) p.push_back(Rational(num(rng), den(rng)));
  return p;
}

Value random_list(std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::vector<Value> items(static_cast<std::size_t>(len(rng)), Value::integer(0));
  return Value::list(items);
}

Rational pow2(int n) {
  Rational r = 1;
  for (int i = 0; i < n; ++i) r *= 2;
  return r;
}

}  // namespace

TEST_CASE("stirling numbers") {
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(3, 0) == 0);
  for (int n = 0; n <= 10; ++n) CHECK(Rational(stirling2(n + 1, 2)) == pow2(n) - 1);
  for (int n = 0; n <= 8; ++n)
    for (int k = 0; k <= n + 1; ++k) CHECK(stirling2(n, k) == count_partitions(n, k));
}

TEST_CASE("basis values") {
  CHECK(basis_value({1, 1}, 3) == 21);
  CHECK(basis_value({0, 2}, 4) == 6);
  for (const auto& cfg : all_configs(3))
    for (const auto& idx : basis_indices(cfg)) CHECK(basis_value(idx, 0) == 0);
}

TEST_CASE("index order is lexicographic with b dominant") {
  auto idx = basis_indices(BasisConfig::mixed(1, 1));
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == BasisIndex{0, 1});
  CHECK(idx[1] == BasisIndex{1, 0});
  CHECK(idx[2] == BasisIndex{1, 1});
}

TEST_CASE("phi spot values") {
  CHECK(phi(BasisConfig::stirling(1), 3, ann({3})) == 21);
  CHECK(phi(BasisConfig::mixed(1, 1), 3, ann({0, 2, 1})) == 35);
  for (const auto& cfg : all_configs(3)) CHECK(phi(cfg, 0, Annotation(basis_size(cfg), Rational(5))) == 0);
}

TEST_CASE("shift and delta on the listed annotations") {
  CHECK(shift(BasisConfig::stirling(1), ann({3})) == ann({6}));
  CHECK(shift(BasisConfig::stirling(2), ann({2, 2})) == ann({6, 6}));
  CHECK(shift(BasisConfig::mixed(1, 1), ann({0, 2, 1})) == ann({1, 6, 2}));
  CHECK(shift(BasisConfig::mixed(1, 1, true), ann({-1, 4, 0})) == ann({-1, 8, 0}));
  CHECK(shift(BasisConfig::binomial(1), ann({1})) == ann({1}));
  CHECK(delta(BasisConfig::stirling(1), ann({3})) == 3);
  CHECK(delta(BasisConfig::mixed(1, 1), ann({0, 2, 1})) == 3);
  CHECK(delta(BasisConfig::binomial(1), ann({1})) == 1);
}

TEST_CASE("shift equation holds for every basis") {
  std::mt19937 rng(2024);
  for (const auto& cfg : all_configs(4)) {
    for (int trial = 0; trial < 200; ++trial) {
      Annotation p = random_annotation(cfg, rng);
      Annotation sp = shift(cfg, p);
      Rational d = delta(cfg, p);
      for (unsigned n = 0; n <= 25; ++n) REQUIRE(phi(cfg, n + 1, p) == d + phi(cfg, n, sp));
    }
  }
}

TEST_CASE("closed forms render the known bounds") {
  CHECK(closed_form(BasisConfig::stirling(1), ann({3}), 1).render() == "3·2^n − 2");
  CHECK(closed_form(BasisConfig::stirling(2), ann({2, 2}), 1).render() == "3^n");
  CHECK(closed_form(BasisConfig::mixed(1, 1), ann({0, 2, 1}), 1).render() == "n·2^n + 2·2^n − n − 1");
  CHECK(closed_form(BasisConfig::mixed(1, 1, true), ann({-1, 4, 0}), 1).render() == "4·2^n − n − 3");
  CHECK(closed_form(BasisConfig::binomial(1), ann({1}), 1).render() == "n + 1");
  CHECK(closed_form(BasisConfig::binomial(2), ann({0, 0}), 0).render() == "0");
  CHECK(closed_form(BasisConfig::binomial(2), ann({0, 1}), 0).render() == "1/2·n^2 − 1/2·n");
}

TEST_CASE("closed forms agree with phi") {
  std::mt19937 rng(99);
  for (const auto& cfg : all_configs(3)) {
    for (int trial = 0; trial < 20; ++trial) {
      Annotation p = random_annotation(cfg, rng);
      Rational q(trial, 3);
      ClosedForm f = closed_form(cfg, p, q);
      for (unsigned n = 0; n <= 20; ++n) REQUIRE(f.evaluate(BigInt(n)) == q + phi(cfg, n, p));
    }
  }
}

TEST_CASE("phi is nonnegative and monotone on the domain") {
  std::mt19937 rng(5);
  for (const auto& cfg : all_configs(3)) {
    for (int trial = 0; trial < 30; ++trial) {
      Annotation p = random_annotation(cfg, rng);
      for (unsigned n = 0; n < 30; ++n) {
        CHECK(phi(cfg, n, p) >= 0);
        CHECK(phi(cfg, n + 1, p) >= phi(cfg, n, p));
      }
    }
  }
  BasisConfig relaxed = BasisConfig::mixed(1, 1, true);
  Annotation demoted = ann({-1, 4, 0});
  REQUIRE(in_domain(relaxed, demoted));
  for (unsigned n = 0; n < 30; ++n) {
    CHECK(phi(relaxed, n, demoted) >= 0);
    CHECK(phi(relaxed, n + 1, demoted) >= phi(relaxed, n, demoted));
  }
}

TEST_CASE("addition") {
  CHECK(add(ann({3}), ann({3})) == ann({6}));
  CHECK(add(add(ann({2, 2}), ann({2, 2})), ann({2, 2})) == ann({6, 6}));
  CHECK(add(ann({1, 2, 3}), zero_annotation(BasisConfig::mixed(1, 1))) == ann({1, 2, 3}));
}

TEST_CASE("demotion") {
  BasisConfig cfg = BasisConfig::mixed(1, 1, true);
  CHECK(demote(cfg, ann({0, 4, 0}), 1) == ann({1, 3, 0}));
  CHECK(demote(cfg, ann({0, 2, 1}), 0) == ann({0, 2, 1}));
  CHECK_THROWS_AS(demote(BasisConfig::mixed(1, 1), ann({0, 4, 0}), 1), std::domain_error);
  CHECK_THROWS_AS(demote(cfg, ann({0, 1, 0}), 2), std::domain_error);

  BasisConfig wide = BasisConfig::mixed(2, 2, true);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> amount(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Annotation p = random_annotation(wide, rng);
    Rational s = std::min(Rational(amount(rng)), p[static_cast<std::size_t>(wide.max_poly_degree)]);
    Annotation d = demote(wide, p, s);
    for (unsigned n = 0; n <= 30; ++n) CHECK(phi(wide, n, d) <= phi(wide, n, p));
  }
}

TEST_CASE("list potential: recursion, closed form, sharing, subtyping") {
  std::mt19937 rng(17);
  BasisConfig cfg = BasisConfig::mixed(2, 2);
  SimpleType nested = SimpleType::pair(SimpleType::list(SimpleType::list(SimpleType::integer())),
                                       SimpleType::list(SimpleType::integer()));
  auto fill = [&] { return random_annotation(cfg, rng); };
  for (int trial = 0; trial < 40; ++trial) {
    AnnotatedType a = annotate_shape<Rational>(nested, fill);
    AnnotatedType b = annotate_shape<Rational>(nested, fill);
    AnnotatedType sum = a;
    sum.children[0].ann = add(a.children[0].ann, b.children[0].ann);
    sum.children[0].children[0].ann = add(a.children[0].children[0].ann, b.children[0].children[0].ann);
    sum.children[1].ann = add(a.children[1].ann, b.children[1].ann);

    std::vector<Value> outer;
    std::uniform_int_distribution<int> len(0, 5);
    for (int i = len(rng); i > 0; --i) outer.push_back(random_list(rng, 6));
    Value v = Value::pair(Value::list(outer), random_list(rng, 8));

    Rational pa = value_potential(v, a, cfg);
    CHECK(pa == value_potential_closed(v, a, cfg));
    Rational pb = value_potential(v, b, cfg);
    CHECK(value_potential(v, sum, cfg) == pa + pb);
    CHECK(value_potential(v, sum, cfg) >= pa);
  }
  AnnotatedType t = annotate_shape<Rational>(SimpleType::list(SimpleType::integer()), [] { return ann({3}); });
  CHECK(value_potential(Value::nil(), t, BasisConfig::stirling(1)) == 0);
  std::vector<Value> three{Value::integer(1), Value::integer(2), Value::integer(3)};
  CHECK(value_potential(Value::list(three), t, BasisConfig::stirling(1)) == 21);
}

TEST_CASE("annotation rendering and json round trip") {
  CHECK(render_annotation(ann({2, 2})) == "{2,2}");
  BasisConfig cfg = BasisConfig::mixed(1, 1, true);
  Annotation p{Rational(-1), Rational(9, 2), Rational(0)};
  auto j = annotation_json(cfg, p);
  CHECK(j["basis"] == "mixed");
  CHECK(j["coeffs"][1]["b"] == 1);
  CHECK(j["coeffs"][1]["v"] == "9/2");
  CHECK(annotation_from_json(cfg, j) == p);
  CHECK_THROWS(annotation_from_json(BasisConfig::stirling(1), j));
}

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(BasisConfig::mixed(1, 1, true).validate());
  BasisConfig bad = BasisConfig::stirling(1);
  bad.demotion = true;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(BasisConfig::binomial(0).validate(), std::invalid_argument);
  CHECK(parse_basis_kind("mixed") == BasisKind::Mixed);
  CHECK_THROWS_AS(parse_basis_kind("gaussian"), std::invalid_argument);
}
