#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "aara/constraints.hpp"
#include "aara/frontend.hpp"

using namespace aara;

namespace {

Program corpus(const std::string& name) {
  return load_program(std::string(AARA_CORPUS_DIR) + "/" + name + ".aex");
}

std::vector<Rational> rats(std::initializer_list<int> xs) { return {xs.begin(), xs.end()}; }

// Coefficients of the i-th list (preorder) of an annotated type.
std::vector<Rational> list_coeffs(const AnnotatedType& t, std::size_t which = 0) {
  std::vector<const AnnotatedType*> lists;
  std::function<void(const AnnotatedType&)> walk = [&](const AnnotatedType& x) {
    if (x.kind == SimpleType::Kind::List) lists.push_back(&x);
    for (const auto& c : x.children) walk(c);
  };
  walk(t);
  REQUIRE(which < lists.size());
  return lists[which]->ann;
}

void pin(std::map<std::string, Rational>& m, const std::string& prefix, std::initializer_list<int> xs) {
  int i = 0;
  for (int x : xs) m[prefix + "." + std::to_string(i++)] = x;
}

}  // namespace

TEST_CASE("skeleton gives one signature per function") {
  Program p = corpus("subSum1");
  ConstraintSystem sys;
  sys.cfg = BasisConfig::mixed(1, 1);
  annotate_skeleton(p, sys);
  REQUIRE(sys.sigs.size() == 2);
  // remove has two lists, subSum1 one; each signature adds q and q'.
  CHECK(sys.lp.variables().size() == (3 + 3 + 2) + (3 + 2));
  auto names = list_variable_names(sys, sys.sigs.at("remove").arg);
  REQUIRE(names.size() == 1);
  CHECK(names[0] == std::vector<std::string>{"remove.arg.r.0", "remove.arg.r.1", "remove.arg.r.2"});
}

TEST_CASE("subsetSum under the Stirling basis") {
  auto start = std::chrono::steady_clock::now();
  Analysis a = analyze(corpus("subsetSum"), BasisConfig::stirling(1));
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(a.outcome.optimal());
  const SolvedSig& s = a.sigs.at("subsetSum");
  CHECK(list_coeffs(s.arg) == rats({3}));
  CHECK(s.q_in == 1);
  CHECK(s.q_out == 0);
  CHECK(seconds < 1.0);
}

TEST_CASE("ballBins3 under the Stirling basis") {
  Analysis a = analyze(corpus("ballBins3"), BasisConfig::stirling(2));
  REQUIRE(a.outcome.optimal());
  const SolvedSig& s = a.sigs.at("ballBins3");
  CHECK(list_coeffs(s.arg) == rats({2, 2}));
  CHECK(s.q_in == 1);
  CHECK(s.q_out == 0);
  CHECK(list_coeffs(a.sigs.at("helper").arg) == rats({2, 2}));
}

TEST_CASE("subsetSum has no polynomial bound") {
  for (int k = 1; k <= 4; ++k) {
    Analysis a = analyze(corpus("subsetSum"), BasisConfig::binomial(k));
    CHECK(a.outcome.status == LpOutcome::Status::Infeasible);
    CHECK(!a.outcome.certificate.empty());
  }
}

TEST_CASE("subSum1 needs a signature remove cannot have") {
  for (bool demote : {false, true}) {
    Analysis a = analyze(corpus("subSum1"), BasisConfig::mixed(1, 1, demote));
    REQUIRE(a.outcome.status == LpOutcome::Status::Infeasible);
    CHECK(a.diagnosis.find("'remove'") != std::string::npos);
    CHECK(a.diagnosis.find("polymorphic") != std::string::npos);
  }
}

TEST_CASE("printed subsetSum annotations complete to a feasible point") {
  ConstraintSystem sys = gen_constraints(corpus("subsetSum"), BasisConfig::stirling(1));
  std::map<std::string, Rational> fixed;
  pin(fixed, "subsetSum.arg.l", {3});
  fixed["subsetSum.q"] = 1;
  fixed["subsetSum.q'"] = 0;
  pin(fixed, "subsetSum.share.tl#1", {3});
  pin(fixed, "subsetSum.share.tl#2", {3});
  fixed["subsetSum.let.newTarget.p"] = 3;
  fixed["subsetSum.let.withNum.p"] = 2;
  fixed["subsetSum.let.without.p"] = 1;
  WitnessCheck w = check_witness(sys, fixed);
  CHECK(w.unknown.empty());
  CHECK(w.feasible);

  fixed["subsetSum.let.without.p"] = 2;
  CHECK_FALSE(check_witness(sys, fixed).feasible);
}

TEST_CASE("printed ballBins3 annotations complete to a feasible point") {
  ConstraintSystem sys = gen_constraints(corpus("ballBins3"), BasisConfig::stirling(2));
  std::map<std::string, Rational> fixed;
  pin(fixed, "helper.arg.l", {2, 2});
  fixed["helper.q"] = 1;
  fixed["helper.q'"] = 0;
  pin(fixed, "ballBins3.arg", {2, 2});
  for (const char* t : {"tl#1", "tl#2", "tl#3"}) pin(fixed, std::string("helper.share.") + t, {2, 2});
  pin(fixed, "helper.share.tl#4", {4, 4});
  const std::pair<const char*, int> lets[] = {{"newA", 3}, {"tmp1", 2}, {"newB", 2},
                                              {"tmp2", 1}, {"newC", 1}, {"tmp3", 0}};
  for (const auto& [x, v] : lets) fixed[std::string("helper.let.") + x + ".p"] = v;
  WitnessCheck w = check_witness(sys, fixed);
  CHECK(w.unknown.empty());
  CHECK(w.feasible);
}

TEST_CASE("printed subSum1 annotations satisfy the subSum1 constraints") {
  struct Case {
    bool demote;
    std::initializer_list<int> sig, remove_arg, remove_res, half;
  };
  for (const Case& c : {Case{false, {0, 2, 1}, {1, 6, 2}, {0, 6, 2}, {0, 2, 1}},
                        Case{true, {-1, 4, 0}, {-1, 8, 0}, {-2, 8, 0}, {-1, 4, 0}}}) {
    CAPTURE(c.demote);
    ConstraintSystem sys = gen_constraints(corpus("subSum1"), BasisConfig::mixed(1, 1, c.demote));
    std::map<std::string, Rational> fixed;
    pin(fixed, "subSum1.arg.l", c.sig);
    fixed["subSum1.q"] = 1;
    fixed["subSum1.q'"] = 0;
    pin(fixed, "remove.arg.r", c.remove_arg);
    pin(fixed, "remove.res", c.remove_res);
    fixed["remove.q"] = 0;
    fixed["remove.q'"] = 0;
    pin(fixed, "subSum1.share.otherNums#1", c.half);
    pin(fixed, "subSum1.share.otherNums#2", c.half);
    fixed["subSum1.let.otherNums.p"] = 4;
    fixed["subSum1.let.newTarg.p"] = 3;
    fixed["subSum1.let.withNum.p"] = 2;
    fixed["subSum1.let.without.p"] = 1;
    WitnessCheck w = check_witness(sys, fixed, std::string("subSum1"));
    CHECK(w.unknown.empty());
    CHECK(w.feasible);
    // The same point violates remove's own rows.
    CHECK_FALSE(check_witness(sys, fixed).feasible);
  }
}

TEST_CASE("every variable reaches the objective") {
  for (const char* name : {"subsetSum", "ballBins3", "subSum1", "snoc", "log"}) {
    CAPTURE(name);
    ConstraintSystem sys = gen_constraints(corpus(name), BasisConfig::mixed(2, 2, true));
    REQUIRE(sys.objectives.size() == 2);
    std::vector<bool> used(sys.lp.variables().size());
    for (const auto& row : sys.lp.rows())
      for (const auto& [v, c] : row.expr.terms()) used[v] = true;
    for (const auto& obj : sys.objectives)
      for (const auto& [v, c] : obj.terms()) used[v] = true;
    for (std::size_t i = 0; i < used.size(); ++i) CHECK_MESSAGE(used[i], sys.lp.variables()[i].name);
    CHECK(sys.origin.size() == sys.lp.rows().size());
  }
}

TEST_CASE("generation is deterministic") {
  auto text = [] {
    ConstraintSystem sys = gen_constraints(corpus("ballBins3"), BasisConfig::stirling(2));
    return emit_lp_text(sys.lp, sys.objectives[0]);
  };
  CHECK(text() == text());
}

TEST_CASE("emitted system round-trips through the text format") {
  ConstraintSystem sys = gen_constraints(corpus("subsetSum"), BasisConfig::stirling(1));
  ParsedLp back = parse_lp_text(emit_lp_text(sys.lp, sys.objectives[0]));
  LpOutcome a = solve(sys.lp, sys.objectives[0]);
  LpOutcome b = solve(back.lp, back.objective);
  REQUIRE(a.optimal());
  REQUIRE(b.optimal());
  CHECK(a.objective == b.objective);
  CHECK(back.lp.rows().size() == sys.lp.rows().size());
}

TEST_CASE("entry selection") {
  Program p = corpus("subSum1");
  CHECK(gen_constraints(p, BasisConfig::mixed(1, 1)).entry == "subSum1");
  CHECK(gen_constraints(p, BasisConfig::mixed(1, 1), "remove").entry == "remove");
  CHECK_THROWS_AS(gen_constraints(p, BasisConfig::mixed(1, 1), "nope"), std::invalid_argument);
  Analysis r = analyze(p, BasisConfig::binomial(1), "remove");
  REQUIRE(r.outcome.optimal());
  CHECK(list_coeffs(r.sigs.at("remove").arg) == rats({1}));
}

TEST_CASE("polynomial programs get their linear bounds") {
  Analysis a = analyze(corpus("snoc"), BasisConfig::binomial(1));
  REQUIRE(a.outcome.optimal());
  auto arg = a.sigs.at("snoc").arg;
  CHECK(list_coeffs(arg) == rats({1}));
}
