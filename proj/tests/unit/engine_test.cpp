#include <doctest.h>

#include "flg/desugar.hpp"
#include "flg/engine.hpp"
#include "flg/parser.hpp"
#include "testkit.hpp"

using namespace flg;
using flg::testkit::dump_world;
using flg::testkit::load;

namespace {

Term var(const char* x) { return mk_var(Symbol(x)); }
Term cons(Term h, Term t) { return mk_ctor(names::cons(), {std::move(h), std::move(t)}); }
Term nil() { return mk_ctor(names::nil()); }

std::string run_text(const std::string& text, EngineOptions opts = {}) {
  auto l = load(text);
  REQUIRE_MESSAGE(l, l.diagnostics);
  World w;
  Engine(*l.prog, nullptr, opts).run(w);
  return dump_world(*l.prog, w);
}

std::string runtime_rule(const std::string& text) {
  auto l = load(text);
  REQUIRE_MESSAGE(l, l.diagnostics);
  World w;
  try {
    Engine(*l.prog, nullptr).run(w);
  } catch (const RuntimeError& e) {
    return e.rule;
  }
  return "";
}

}  // namespace

TEST_CASE("unification against values") {
  Substitution th;
  CHECK(unify_value(th, var("X"), mk_bv32(5)));
  CHECK(term_equal(*th.find(Symbol("X")), mk_bv32(5)));

  Substitution th2;
  th2.bind(Symbol("Y"), cons(mk_bv32(1), nil()));
  CHECK(unify_terms(th2, var("Y"), cons(var("X"), nil())));
  CHECK(term_equal(*th2.find(Symbol("X")), mk_bv32(1)));

  Substitution th3;
  try {
    unify_terms(th3, var("X"), var("Y"));
    FAIL("no error");
  } catch (const RuntimeError& e) {
    CHECK(e.rule == "uu-FF");
  }

  Substitution th4;  // clash with one ground side: plain failure
  CHECK_FALSE(unify_terms(th4, mk_ctor(Symbol("f"), {var("X")}), mk_ctor(Symbol("g"), {mk_bv32(1)})));
  Substitution th5;  // repeated variable must agree
  CHECK_FALSE(unify_value(th5, mk_ctor(Symbol("f"), {var("X"), var("X")}),
                          mk_ctor(Symbol("f"), {mk_bv32(1), mk_bv32(2)})));
}

TEST_CASE("expression evaluation") {
  CHECK(run_text("output q(bv[32])\nq(if true then 1 else 2).\n") == "== q (1)\n1\n");
  CHECK(run_text("fun decr(n : bv[32]) : bv[32] option = if n > 0 then some(n - 1) else none\n"
                 "output q(bv[32] option)\nq(decr(0)).\nq(decr(3)).\n") == "== q (2)\nnone\nsome(2)\n");
  // Signed division truncates toward zero; the minimum divided by -1 wraps.
  CHECK(run_text("output q(bv[32])\nq(-7 / 2).\nq(-7 % 2).\nq(-2147483648 / -1).\n") ==
        "== q (3)\n-2147483648\n-3\n-1\n");
  CHECK(run_text("output q(string)\nq(\"n=\" ^ to_string(4)).\nq(to_string(\"s\")).\n") ==
        "== q (2)\n\"n=4\"\n\"s\"\n");
  CHECK(run_text("output q(bool)\nq(1 < 2 && !(2 <= 1) || false).\n") == "== q (1)\ntrue\n");
}

TEST_CASE("a relation used as a function") {
  const std::string base = "output p(bv[32], bv[32])\np(1, 2).\np(3, 2).\n";
  std::string out = run_text(base + "output q(bv[32] list)\nq(p(_, ?\?)).\n");
  CHECK(out.find("== q (1)\n[2,2]\n") != std::string::npos);
  out = run_text(base + "output q(bv[32] list)\nq(p(?\?, 2)).\n");
  CHECK(out.find("== q (1)\n[1,3]\n") != std::string::npos);
  out = run_text(base + "output q(bool)\nq(p(1, 2)).\nq(p(2, 1)).\n");
  CHECK(out.find("== q (2)\nfalse\ntrue\n") != std::string::npos);
}

TEST_CASE("formula construction") {
  auto l = load("type foo = | bar(bv[32])\n");
  REQUIRE(l);
  Engine eng(*l.prog, nullptr);
  World w;
  auto eval = [&](const std::string& src) {
    Diagnostics d;
    auto node = parse_expression(src);
    ExprPtr e = resolve_closed(*l.prog, *node, d);
    REQUIRE_MESSAGE(e, d.render());
    return to_source(eng.eval_closed(*e, w));
  };
  CHECK(eval("`true`") == "`true`");
  CHECK(eval("`bar(#x[bv[32]])`") == "`bar(#x[bv[32]])`");
  CHECK(eval("`~false`") == "`~false`");
}

TEST_CASE("values lifted to formulas") {
  auto l = load("");
  REQUIRE(l);
  const Program& p = *l.prog;
  Value five = to_smt_value(p, mk_bv32(5), t_bv(32));
  CHECK(five->kind == TermKind::Smt);
  CHECK(five->op == SmtOp::Const);
  Value lst = to_smt_value(p, cons(mk_bool(true), nil()), t_adt(names::list(), {t_bool()}));
  REQUIRE(lst->op == SmtOp::Ctor);
  CHECK(lst->sym == names::cons());
  CHECK(lst->args[0]->op == SmtOp::Const);
  CHECK(lst->args[1]->op == SmtOp::Ctor);
  Value q = mk_smt(SmtOp::Forall, {smt_var(mk_string("x"), t_bool()), smt_var(mk_string("x"), t_bool())},
                   Symbol(), nullptr, 1);
  CHECK(term_equal(to_smt_value(p, q, t_bool()), q));
}

TEST_CASE("clause application and fixed points") {
  auto l = load("input edge(bv[32], bv[32])\noutput path(bv[32], bv[32])\n"
                "path(X, Y) :- edge(X, Y).\npath(X, Z) :- path(X, Y), edge(Y, Z).\n");
  REQUIRE(l);
  Engine eng(*l.prog, nullptr);
  World w;
  w.relation(Symbol("path"), 2).insert({mk_bv32(1), mk_bv32(2)});
  w.relation(Symbol("edge"), 2).insert({mk_bv32(2), mk_bv32(3)});
  auto derived = eng.apply_clause(l.prog->clauses[1], w);
  REQUIRE(derived.size() == 1);
  CHECK(to_source(derived[0][0]) + "," + to_source(derived[0][1]) == "1,3");

  for (bool semi : {true, false}) {
    World w2;
    w2.relation(Symbol("edge"), 2).insert({mk_bv32(1), mk_bv32(2)});
    w2.relation(Symbol("edge"), 2).insert({mk_bv32(2), mk_bv32(3)});
    EngineOptions o;
    o.semi_naive = semi;
    Engine(*l.prog, nullptr, o).run(w2);
    CHECK(dump_world(*l.prog, w2) == "== path (3)\n1\t2\n1\t3\n2\t3\n");
  }

  World edb;
  edb.relation(Symbol("edge"), 2).insert({mk_bv32(4), mk_bv32(4)});
  auto rules_only = load("input edge(bv[32], bv[32])\n");
  Engine(*rules_only.prog, nullptr).run(edb);
  CHECK(edb.size(Symbol("edge")) == 1);
}

TEST_CASE("runtime errors name their rule") {
  CHECK(runtime_rule("output q(bv[32])\nq(1 / 0).\n") == "op-domain");
  CHECK(runtime_rule("type t = | a | b\nfun f(x : t) : bv[32] = match x with a => 1 end\n"
                     "output q(bv[32])\nq(f(b)).\n") == "e-Match-E");
  CHECK(runtime_rule("fun f(n : bv[32]) : bv[32] = f(n + 1)\noutput q(bv[32])\nq(f(0)).\n") == "call-depth");
  CHECK(runtime_rule("output q(bv[32])\nq(0).\nq(X + 1) :- q(X).\n") == "iteration-bound");
  CHECK(runtime_rule("output q(bool)\nq(B) :- B = is_sat(`true`).\n") == "smt-unavailable");
}

TEST_CASE("negated atom over an unbound variable") {
  auto l = load("output p(bv[32])\noutput q(bv[32])\np(1).\nq(X) :- p(X), !p(X).\n");
  REQUIRE(l);
  Program prog = std::move(*l.prog);
  Clause& c = prog.clauses.back();
  REQUIRE(c.body.back().kind == PremiseKind::NegAtom);
  c.body.back().vars[0] = Symbol("Unbound");  // what validation would have rejected
  Engine eng(prog, nullptr);
  World w;
  w.relation(Symbol("p"), 1).insert({mk_bv32(1)});
  try {
    eng.apply_clause(c, w);
    FAIL("no error");
  } catch (const RuntimeError& e) {
    CHECK(e.rule == "NegAtom-E");
  }
}

TEST_CASE("soft mode drops failing derivations") {
  const std::string text = "output p(bv[32])\noutput q(bv[32])\np(0).\np(2).\nq(10 / X) :- p(X).\n";
  EngineOptions soft;
  soft.mode = ErrorMode::Soft;
  auto l = load(text);
  REQUIRE(l);
  World w;
  Engine eng(*l.prog, nullptr, soft);
  eng.run(w);
  CHECK(dump_world(*l.prog, w) == "== p (2)\n0\n2\n== q (1)\n5\n");
  CHECK(eng.stats().soft_drops == 1);
  CHECK(runtime_rule(text) == "op-domain");
}

TEST_CASE("workers do not change the result") {
  std::string text = "output e(bv[32], bv[32])\noutput r(bv[32], bv[32])\n"
                     "r(X, Y) :- e(X, Y).\nr(X, Z) :- r(X, Y), e(Y, Z).\n";
  for (int i = 0; i < 80; ++i) text += "e(" + std::to_string(i) + ", " + std::to_string((i * 7 + 3) % 80) + ").\n";
  EngineOptions one, many;
  many.workers = 8;
  CHECK(run_text(text, one) == run_text(text, many));
}

TEST_CASE("type checks after each stratum") {
  int seen = 0;
  EngineOptions o;
  o.check_types = true;
  o.after_stratum = [&](const Stratum&, const World&) { ++seen; };
  run_text("output a(bv[32])\noutput b(bv[32])\na(1).\nb(X + 1) :- a(X).\n", o);
  CHECK(seen == 2);
}
