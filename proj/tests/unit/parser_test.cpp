#include <doctest.h>

#include <random>

#include "flg/desugar.hpp"
#include "flg/parser.hpp"
#include "testkit.hpp"

using namespace flg;
using flg::testkit::load;

TEST_CASE("empty input is an empty program") {
  SourceProgram p = parse_program("");
  CHECK(p.decls.empty());
  auto l = load("");
  REQUIRE(l);
  CHECK(l.prog->clauses.empty());
  CHECK(l.prog->rels.empty());
}

TEST_CASE("nullary constructor type") {
  auto l = load("type foo = | bar\n");
  REQUIRE(l);
  const AdtDecl* foo = l.prog->adt(Symbol("foo"));
  REQUIRE(foo);
  REQUIRE(foo->ctors.size() == 1);
  CHECK(foo->ctors[0] == Symbol("bar"));
  CHECK(l.prog->ctors.at(Symbol("bar")).args.empty());
}

TEST_CASE("explosion clause: both equation sides are split through a fresh variable") {
  auto l = load("output ok\nok :- is_valid(`false ==> #x[bool]`) = true.\n");
  REQUIRE(l);
  REQUIRE(l.prog->clauses.size() == 1);
  const Clause& c = l.prog->clauses[0];
  CHECK(c.head == Symbol("ok"));
  REQUIRE(c.body.size() == 2);
  CHECK(c.body[0].kind == PremiseKind::Eq);
  CHECK(c.body[1].kind == PremiseKind::Eq);
  CHECK(c.body[0].var == c.body[1].var);
}

TEST_CASE("#id[t] names a formula variable by string") {
  SNodePtr n = parse_expression("#x[bool]");
  CHECK(n->kind == SKind::SmtVarId);
  CHECK(n->text == "x");
  auto l = load("");
  Diagnostics d;
  ExprPtr e = resolve_closed(*l.prog, *n, d);
  REQUIRE(e);
  // Outside a quote the variable is built by the smt_var constructor.
  CHECK(to_string(*e).find("\"x\"") != std::string::npos);
}

TEST_CASE("atoms are normalised to take variables only") {
  auto l = load("type inst = | i_fail | i_nop\n"
                "input node_has_inst(bv[32], inst)\noutput bad(bv[32])\n"
                "bad(Curr) :- node_has_inst(Curr, i_fail).\n");
  REQUIRE(l);
  const Clause& c = l.prog->clauses.at(0);
  REQUIRE(c.body.size() == 2);
  CHECK(c.body[0].kind == PremiseKind::PosAtom);
  CHECK(c.body[0].vars.at(0) == Symbol("Curr"));
  Symbol fresh = c.body[0].vars.at(1);
  CHECK(fresh.str().rfind("%V", 0) == 0);
  CHECK(c.body[1].kind == PremiseKind::Eq);
  CHECK(c.body[1].var == fresh);
  CHECK(to_string(*c.body[1].expr) == "i_fail");
}

TEST_CASE("constructors inside quotes become formula constructors") {
  auto l = load("type foo = | bar(bv[32])\noutput ok\n"
                "ok :- X = #x[bv[32]], is_sat(`bar(X) #= bar(5)`) = true.\n");
  REQUIRE(l);
  std::string body = to_string(l.prog->clauses.at(0));
  CHECK(body.find("`smt_eq(ctor[bar](unquote(X)), ctor[bar](unquote(5)))`") != std::string::npos);
  CHECK(body.find(",X)") == std::string::npos);  // X only appears unquoted
  CHECK(body.find("unquote(X)") != std::string::npos);
}

TEST_CASE("syntax errors carry position and expected tokens") {
  try {
    parse_program("output p(bv[32])\np(1) :- .\n", "bad.flg");
    FAIL("no error");
  } catch (const DiagnosticError& e) {
    CHECK(e.diag.rule == "syntax");
    CHECK(e.diag.span.line == 2);
    CHECK(e.diag.message.find("expected") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_program("fun f(x : bv[32]) : bv[32] = 99999999999\n"), DiagnosticError);
  CHECK_THROWS_AS(parse_program("(* never closed"), DiagnosticError);
}

TEST_CASE("records, record update and local functions desugar") {
  auto l = load("type pt = { px : bv[32]; py : bv[32] }\n"
                "fun shift(p : pt, d : bv[32]) : pt =\n"
                "  let fun bump(v : bv[32]) : bv[32] = v + d in\n"
                "  { p with px = bump(px(p)) }\n"
                "output q(pt)\n"
                "q(shift({ px = 1; py = 2 }, 10)).\n");
  REQUIRE_MESSAGE(l, l.diagnostics);
  World w;
  Engine(*l.prog, nullptr).run(w);
  CHECK(flg::testkit::dump_world(*l.prog, w) == "== q (1)\n{px=11;py=2;}\n");
}

TEST_CASE("printer output reparses to the same tree") {
  std::vector<std::string> texts = {
      flg::testkit::read_text(flg::testkit::source_path("tests/fixtures/symexec/symexec.flg")),
      flg::testkit::read_text(flg::testkit::source_path("tests/golden/forall_pattern.flg")),
      flg::testkit::read_text(flg::testkit::source_path("tests/golden/record_tuple.flg")),
  };
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) texts.push_back(flg::testkit::random_ml_program(rng));
  for (const auto& t : texts) {
    SourceProgram a = parse_program(t);
    std::string printed = print_source(a);
    SourceProgram b = parse_program(printed);
    CHECK_MESSAGE(surface_equal(a, b), printed);
  }
}
