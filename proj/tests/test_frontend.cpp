#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aara/frontend.hpp"

using namespace aara;

#ifndef AARA_CORPUS_DIR
#define AARA_CORPUS_DIR "corpus"
#endif

namespace {

std::string corpus(const std::string& name) { return std::string(AARA_CORPUS_DIR) + "/" + name + ".aex"; }

int count_shares_on(const CoreExpr& e, const std::string& root) {
  int n = 0;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, expr::Share>) {
          if (node.source.rfind(root, 0) == 0) ++n;
          n += count_shares_on(*node.body, root);
        } else if constexpr (std::is_same_v<T, expr::Let>) {
          n += count_shares_on(*node.bound, root) + count_shares_on(*node.body, root);
        } else if constexpr (std::is_same_v<T, expr::Cond>) {
          n += count_shares_on(*node.then_branch, root) + count_shares_on(*node.else_branch, root);
        } else if constexpr (std::is_same_v<T, expr::PairMatch>) {
          n += count_shares_on(*node.body, root);
        } else if constexpr (std::is_same_v<T, expr::ListMatch>) {
          n += count_shares_on(*node.nil_branch, root) + count_shares_on(*node.cons_branch, root);
        }
      },
      e.node);
  return n;
}

int count_ticks(const CoreExpr& e) {
  int n = 0;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, expr::Tick>) ++n;
        else if constexpr (std::is_same_v<T, expr::Share>) n += count_ticks(*node.body);
        else if constexpr (std::is_same_v<T, expr::Let>) n += count_ticks(*node.bound) + count_ticks(*node.body);
        else if constexpr (std::is_same_v<T, expr::Cond>)
          n += count_ticks(*node.then_branch) + count_ticks(*node.else_branch);
        else if constexpr (std::is_same_v<T, expr::PairMatch>) n += count_ticks(*node.body);
        else if constexpr (std::is_same_v<T, expr::ListMatch>)
          n += count_ticks(*node.nil_branch) + count_ticks(*node.cons_branch);
      },
      e.node);
  return n;
}

bool rejects(const std::string& src) {
  try {
    elaborate(src);
  } catch (const FrontendError& e) {
    CHECK_FALSE(e.diagnostics().empty());
    return true;
  }
  return false;
}

}  // namespace

TEST_CASE("empty source is an empty program") { CHECK(parse("").functions.empty()); }

TEST_CASE("comments nest") {
  auto p = parse("(* a (* b *) c *) let f x = x");
  REQUIRE(p.functions.size() == 1);
  CHECK(p.functions[0].name == "f");
}

TEST_CASE("duplicate function names are rejected") {
  CHECK_THROWS_AS(parse("let f x = x let f y = y"), FrontendError);
}

TEST_CASE("syntax errors carry a span") {
  try {
    parse("let f x =\n  match x with | [] -> ");
    FAIL("expected a syntax error");
  } catch (const FrontendError& e) {
    REQUIRE(!e.diagnostics().empty());
    CHECK(e.diagnostics()[0].span.line == 2);
  }
}

TEST_CASE("compound operands are hoisted in order") {
  auto p = parse("let g x = x let f a b = g a :: b");
  Program core = let_normalize(p);
  const auto* body = core.find("f")->body.get();
  // PairMatch for the two parameters, then the hoisted call.
  const auto* pm = body->as<expr::PairMatch>();
  REQUIRE(pm);
  const auto* let = pm->body->as<expr::Let>();
  REQUIRE(let);
  CHECK(let->bound->as<expr::App>());
  const auto* cons = let->body->as<expr::Cons>();
  REQUIRE(cons);
  CHECK(cons->head == let->binder);
  CHECK(cons->tail == "b");
}

TEST_CASE("literal operands are hoisted") {
  auto p = parse("let f x = tick 1; x = 0");
  Program core = let_normalize(p);
  const auto* seq = core.find("f")->body->as<expr::Let>();
  REQUIRE(seq);
  CHECK(seq->binder == "_");
  CHECK(seq->bound->as<expr::Tick>());
  const auto* lit = seq->body->as<expr::Let>();
  REQUIRE(lit);
  CHECK(lit->bound->as<expr::Lit>());
  const auto* eq = lit->body->as<expr::Binop>();
  REQUIRE(eq);
  CHECK(eq->op == BinOp::Eq);
  CHECK(eq->rhs == lit->binder);
}

TEST_CASE("normal forms are a fixpoint of normalization") {
  Program core = let_normalize(parse("let f x = let y = x + x in y"));
  std::string printed = print_program(core);
  Program again = let_normalize(parse(printed));
  CHECK(same_structure(*core.find("f")->body, *again.find("f")->body));
}

TEST_CASE("two uses of a variable make one share") {
  ExprPtr e = insert_shares(make_expr(expr::Binop{BinOp::Add, "x", "x"}));
  const auto* s = e->as<expr::Share>();
  REQUIRE(s);
  CHECK(s->source == "x");
  const auto* b = s->body->as<expr::Binop>();
  REQUIRE(b);
  CHECK(b->lhs == s->left);
  CHECK(b->rhs == s->right);
  CHECK(!check_linear(*e));
}

TEST_CASE("corpus programs elaborate to linear, typed programs") {
  for (const char* name : {"snoc", "subsetSum", "ballBins3", "subSum1", "log", "loop"}) {
    CAPTURE(name);
    Program p = load_program(corpus(name));
    CHECK(!check_linear(p));
    for (const auto& f : p.functions()) {
      CHECK(f.param_type);
      CHECK(f.result_type);
    }
  }
}

TEST_CASE("share counts on the list tails") {
  Program s = load_program(corpus("subsetSum"));
  CHECK(count_shares_on(*s.find("subsetSum")->body, "tl") == 1);
  Program b = load_program(corpus("ballBins3"));
  CHECK(count_shares_on(*b.find("helper")->body, "tl") == 2);
}

TEST_CASE("ticks survive elaboration") {
  Program p = load_program(corpus("subsetSum"));
  CHECK(count_ticks(*p.find("subsetSum")->body) == 3);
}

TEST_CASE("inferred signatures") {
  Program snoc = load_program(corpus("snoc"));
  CHECK(snoc.find("snoc")->param_type->str() == "(int × int list)");
  CHECK(snoc.find("snoc")->result_type->str() == "int list");
  Program ss = load_program(corpus("subsetSum"));
  CHECK(ss.find("subsetSum")->param_type->str() == "(int list × int)");
  CHECK(ss.find("subsetSum")->result_type->str() == "bool");
}

TEST_CASE("ill-typed and ambiguous programs are rejected") {
  CHECK(rejects("let f x = x x"));
  CHECK(rejects("let f x = x"));
  CHECK(rejects("let f x = x + true"));
  CHECK(rejects("let f xs = match xs with | [] -> 0 | h :: t -> h :: t"));
  CHECK(rejects("let f x = y"));
}

TEST_CASE("arity mismatches are diagnosed") {
  CHECK(rejects("let f a b = a + b let g x = f x"));
}

TEST_CASE("append is synthesized for @") {
  Program p = elaborate("let f xs = let ys = 1 :: [] in xs @ ys");
  CHECK(p.find("append"));
  CHECK(p.find("f")->param_type->str() == "int list");
}
