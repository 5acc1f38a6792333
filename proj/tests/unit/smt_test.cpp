#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "flg/engine.hpp"
#include "flg/smt.hpp"
#include "smt/sexpr.hpp"
#include "testkit.hpp"

using namespace flg;
using flg::testkit::load;
namespace fs = std::filesystem;

namespace {

Value bvar(const char* n) { return smt_var(mk_string(n), t_bool()); }

const Program& empty_program() {
  static auto l = load("");
  return *l.prog;
}

fs::path temp_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("flg-unit-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("s-expression reader") {
  auto nodes = sexpr::parse_all("(a (b \"c\"\"d\") |x y|) sat");
  REQUIRE(nodes.size() == 2);
  CHECK(nodes[0].items.size() == 3);
  CHECK(nodes[0].items[1].items[1].text == "c\"d");
  CHECK(nodes[1].is_atom("sat"));
  CHECK(sexpr::complete_prefix("(a (b)") == std::string::npos);
  CHECK(sexpr::complete_prefix("sat\n(") == 3);
}

TEST_CASE("serialization of a closed query") {
  SmtSerializer ser(empty_program());
  SmtScript s = ser.serialize({smt_const(mk_bool(true))}, false, std::nullopt);
  CHECK(s.text == "(push 1)\n(set-option :timeout 4294967295)\n(assert true)\n(check-sat)\n(pop 1)\n");
  SmtScript t = ser.serialize({smt_const(mk_bool(true))}, false, 50);
  CHECK(t.text.find("(set-option :timeout 50)\n") != std::string::npos);
  CHECK(s.key == t.key);  // the timeout is not part of the memo key
  CHECK(s.content != t.content);
  CHECK(smt_prelude().find("(set-option :produce-models true)") != std::string::npos);
}

TEST_CASE("negated explosion") {
  SmtSerializer ser(empty_program());
  Value phi = mk_smt(SmtOp::Not, {mk_smt(SmtOp::Imp, {smt_const(mk_bool(false)), bvar("x")})});
  SmtScript s = ser.serialize({phi}, false, std::nullopt);
  std::string x = ser.var_name(bvar("x"));
  CHECK(x.rfind("x!", 0) == 0);
  CHECK(s.text.find("(declare-const " + x + " Bool)\n(assert (not (=> false " + x + ")))\n") !=
        std::string::npos);
  REQUIRE(s.vars.size() == 1);
  CHECK(s.vars[0].first == x);
}

TEST_CASE("variable names keep distinct variables apart") {
  SmtSerializer ser(empty_program());
  CHECK(ser.var_name(bvar("x")) != ser.var_name(bvar("y")));
  CHECK(ser.var_name(bvar("x")) != ser.var_name(smt_var(mk_string("x"), t_bv(32))));
  std::string odd = ser.var_name(smt_var(mk_string("9 |weird|"), t_bool()));
  CHECK(odd.find('|') == std::string::npos);
  CHECK(odd.find(' ') == std::string::npos);
  CHECK_FALSE(std::isdigit(static_cast<unsigned char>(odd[0])));
}

TEST_CASE("quantifier patterns") {
  auto l = load("uninterpreted fun f(bv[32]) : bv[32]\n");
  REQUIRE(l);
  SmtSerializer ser(*l.prog);
  Value a = smt_var(mk_string("a"), t_bv(32));
  Value fa = mk_smt(SmtOp::Uf, {a}, Symbol("f"));
  Value body = mk_smt(SmtOp::Eq, {fa, a}, Symbol(), t_bv(32));

  std::vector<std::string> warns;
  Value kept = mk_smt(SmtOp::Forall, {a, body, fa}, Symbol(), nullptr, 1);
  std::string s = ser.serialize({kept}, false, std::nullopt, &warns).text;
  CHECK(s.find(":pattern ((f ") != std::string::npos);
  CHECK(warns.empty());

  Value plain = mk_smt(SmtOp::Forall, {a, body}, Symbol(), nullptr, 1);
  CHECK(ser.serialize({plain}, false, std::nullopt, &warns).text.find(":pattern") == std::string::npos);

  Value nested = mk_smt(SmtOp::Forall, {a, body, mk_smt(SmtOp::Forall, {a, body}, Symbol(), nullptr, 1)},
                        Symbol(), nullptr, 1);
  s = ser.serialize({nested}, false, std::nullopt, &warns).text;
  CHECK(s.find(":pattern") == std::string::npos);
  CHECK(warns.size() == 1);

  warns.clear();
  Value bare = mk_smt(SmtOp::Forall, {a, body, a}, Symbol(), nullptr, 1);
  CHECK(ser.serialize({bare}, false, std::nullopt, &warns).text.find(":pattern") == std::string::npos);
  CHECK(warns.size() == 1);
}

TEST_CASE("solver replies") {
  CHECK(parse_reply("sat\n", false).verdict == Verdict::Sat);
  CHECK(parse_reply("unsat", false).verdict == Verdict::Unsat);
  CHECK(parse_reply("unknown\n", true).verdict == Verdict::Unknown);
  SmtReply r = parse_reply("sat\n(\n  (define-fun x () Bool true))\n", true);
  CHECK(r.model.rfind("(", 0) == 0);
  try {
    parse_reply("(error \"line 1: bad\")", false);
    FAIL("no error");
  } catch (const RuntimeError& e) {
    CHECK(e.rule == "smt-protocol");
  }
}

TEST_CASE("model decoding") {
  auto l = load("type 'a box = | box('a) | nothing\n");
  REQUIRE(l);
  const Program& p = *l.prog;
  SmtSerializer ser(p);
  Value x = bvar("x");
  Value b = smt_var(mk_string("b"), t_bv(32));
  Value n = smt_var(mk_string("n"), t_bv(32));
  Value s = smt_var(mk_string("s"), t_string());
  Value bl = smt_var(mk_string("l"), t_adt(names::list(), {t_bool()}));
  Value bx = smt_var(mk_string("bx"), t_adt(Symbol("box"), {t_bv(64)}));
  std::vector<std::pair<std::string, Term>> vars;
  for (const auto& v : {x, b, n, s, bl, bx}) vars.emplace_back(ser.var_name(v), v);
  auto name = [&](const Value& v) { return ser.var_name(v); };
  std::string text = "(\n  (define-fun " + name(x) + " () Bool true)\n" +                     //
                     "  (define-fun " + name(b) + " () (_ BitVec 32) #b00000000000000000000000000000101)\n" +
                     "  (define-fun " + name(n) + " () (_ BitVec 32) #xfffffffe)\n" +        //
                     "  (define-fun " + name(s) + " () String \"a\"\"b\")\n" +                //
                     "  (define-fun " + name(bl) + " () (list Bool) (cons true (as nil (list Bool))))\n" +
                     "  (define-fun " + name(bx) + " () (box (_ BitVec 64)) (box (_ bv9 64)))\n" +
                     "  (define-fun g ((x!0 Bool)) Bool x!0)\n)";
  auto m = parse_model(p, text, vars);
  CHECK(to_source(*m->lookup(x)) == "true");
  CHECK(to_source(*m->lookup(b)) == "5");
  CHECK(to_source(*m->lookup(n)) == "-2");
  CHECK(to_source(*m->lookup(s)) == "\"a\\\"b\"");
  CHECK(to_source(*m->lookup(bl)) == "[true]");
  CHECK(to_source(*m->lookup(bx)) == "box(9L)");

  auto empty = parse_model(p, "(\n)", {});
  CHECK(empty->entries.empty());
  CHECK(to_source(smt_query_model(x, mk_model(empty))) == "none");
  CHECK(to_source(smt_query_model(x, mk_model(m))) == "some(true)");
}

TEST_CASE("operators over a truth-table backend") {
  SmtSolver s(empty_program(), make_truth_table_backend());
  CHECK(smt_is_sat(s, smt_const(mk_bool(true))));
  CHECK_FALSE(smt_is_sat(s, mk_smt(SmtOp::And, {bvar("x"), mk_smt(SmtOp::Not, {bvar("x")})})));
  CHECK(smt_is_valid(s, mk_smt(SmtOp::Imp, {smt_const(mk_bool(false)), bvar("x")})));
  CHECK_FALSE(smt_is_valid(s, bvar("x")));
  Value list = mk_list({bvar("x"), mk_smt(SmtOp::Not, {bvar("y")})});
  Value model = smt_get_model(s, list, mk_ctor(names::none()));
  REQUIRE(model->sym == names::some());
  CHECK(to_source(smt_query_model(bvar("x"), model->args[0])) == "some(true)");
  CHECK(to_source(smt_query_model(bvar("y"), model->args[0])) == "some(false)");
  CHECK(to_source(smt_is_sat_opt(s, list, mk_ctor(names::some(), {mk_bv32(10)}))) == "some(true)");
  CHECK_THROWS_AS(smt_is_sat_opt(s, list, mk_ctor(names::some(), {mk_bv32(0)})), RuntimeError);
}

TEST_CASE("unknown answers") {
  SmtSolver s(empty_program(), std::make_unique<flg::testkit::CaptureBackend>("unknown"));
  try {
    smt_is_sat(s, bvar("x"));
    FAIL("no error");
  } catch (const RuntimeError& e) {
    CHECK(e.rule == "smt-unknown");
  }
  CHECK(to_source(smt_is_sat_opt(s, mk_list({bvar("x")}), mk_ctor(names::none()))) == "none");
  CHECK(to_source(smt_get_model(s, mk_list({bvar("x")}), mk_ctor(names::none()))) == "none");
}

TEST_CASE("memoization and script dumps") {
  fs::path d = temp_dir("dumps");
  SmtOptions o;
  o.dump_dir = d.string();
  SmtSolver s(empty_program(), make_truth_table_backend(), o);
  smt_is_sat(s, bvar("x"));
  smt_is_sat(s, bvar("x"));
  CHECK(s.dispatches() == 1);
  CHECK(s.memo_hits() == 1);
  smt_is_sat(s, bvar("y"));
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++files;
  CHECK(files == 2);
  fs::remove_all(d);
}

TEST_CASE("recording and replay") {
  fs::path d = temp_dir("replay");
  {
    SmtSolver rec(empty_program(), make_recording_backend(make_truth_table_backend(), d.string()));
    CHECK(smt_is_sat(rec, bvar("x")));
    CHECK_FALSE(smt_is_sat(rec, mk_smt(SmtOp::And, {bvar("x"), mk_smt(SmtOp::Not, {bvar("x")})})));
  }
  SmtSolver rep(empty_program(), make_replay_backend(d.string()));
  CHECK(smt_is_sat(rep, bvar("x")));
  CHECK_FALSE(smt_is_sat(rep, mk_smt(SmtOp::And, {bvar("x"), mk_smt(SmtOp::Not, {bvar("x")})})));
  try {
    smt_is_sat(rep, bvar("never_recorded"));
    FAIL("no error");
  } catch (const RuntimeError& e) {
    CHECK(e.rule == "smt-replay");
  }
  fs::remove_all(d);
}

TEST_CASE("a live solver process, when one is installed") {
  auto z3 = find_solver();
  if (!z3) {
    MESSAGE("no solver found; skipping");
    return;
  }
  auto l = load("type foo = | bar(bv[32])\n");
  REQUIRE(l);
  SmtSolver s(*l.prog, make_process_backend(*z3, 2));
  Value x = smt_var(mk_string("x"), t_bv(32));
  Value lhs = mk_smt(SmtOp::Ctor, {x}, Symbol("bar"), t_adt(Symbol("foo")));
  Value rhs = mk_smt(SmtOp::Ctor, {smt_const(mk_bv32(5))}, Symbol("bar"), t_adt(Symbol("foo")));
  CHECK(smt_is_sat(s, mk_smt(SmtOp::Eq, {lhs, rhs}, Symbol(), t_adt(Symbol("foo")))));
  CHECK(smt_is_sat(s, smt_const(mk_bool(true))));
  CHECK_FALSE(smt_is_sat(s, mk_smt(SmtOp::And, {bvar("x"), mk_smt(SmtOp::Not, {bvar("x")})})));
  Value m = smt_get_model(s, mk_list({mk_smt(SmtOp::Eq, {x, smt_const(mk_bv32(-7))}, Symbol(), t_bv(32))}),
                          mk_ctor(names::none()));
  REQUIRE(m->sym == names::some());
  CHECK(to_source(smt_query_model(x, m->args[0])) == "some(-7)");
}
