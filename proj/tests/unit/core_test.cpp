#include <doctest.h>

#include "flg/substitution.hpp"
#include "flg/typecheck.hpp"
#include "flg/world.hpp"
#include "testkit.hpp"

using namespace flg;

namespace {
Term nil() { return mk_ctor(names::nil()); }
Term cons(Term h, Term t) { return mk_ctor(names::cons(), {std::move(h), std::move(t)}); }
Term var(const char* x) { return mk_var(Symbol(x)); }
}  // namespace

TEST_CASE("substitution application") {
  Substitution th;
  th.bind(Symbol("X"), mk_bv32(5));
  CHECK(term_equal(th.apply(cons(var("X"), nil())), cons(mk_bv32(5), nil())));

  Substitution empty;
  CHECK(term_equal(empty.apply(var("X")), var("X")));

  Substitution tf;
  tf.bind(Symbol("X"), mk_bool(true));
  tf.bind(Symbol("Y"), mk_bool(false));
  Term pair = mk_ctor(Symbol("pair"), {var("X"), mk_ctor(Symbol("pair"), {var("Y"), var("X")})});
  CHECK(to_source(tf.apply(pair)) == "pair(true,pair(false,true))");

  CHECK_THROWS_AS(tf.bind(Symbol("X"), mk_bool(false)), std::logic_error);
  auto m = tf.mark();
  tf.bind(Symbol("Z"), nil());
  tf.rewind(m);
  CHECK_FALSE(tf.bound(Symbol("Z")));
}

TEST_CASE("groundness") {
  CHECK(is_ground(mk_bv32(5)));
  CHECK_FALSE(is_ground(cons(var("X"), nil())));
  // Formula variables are ground terms.
  CHECK(is_ground(smt_var(mk_string("x"), t_bool())));
}

TEST_CASE("canonical order") {
  CHECK(term_compare(mk_bv32(1), mk_bv32(2)) < 0);
  CHECK(term_compare(mk_bv32(-1), mk_bv32(0)) < 0);  // signed
  CHECK(term_compare(cons(mk_bv32(1), nil()), cons(mk_bv32(1), nil())) == 0);
  CHECK(term_compare(nil(), cons(mk_bv32(0), nil())) < 0);  // arity first
  CHECK(term_compare(mk_ctor(Symbol("b")), mk_ctor(Symbol("a"), {nil()})) < 0);
  CHECK(term_compare(mk_ctor(Symbol("a")), mk_ctor(Symbol("b"))) < 0);
  CHECK(term_equal(mk_string("a\tb"), mk_string("a\tb")));
  CHECK(mk_string("x")->hash == mk_string("x")->hash);
}

TEST_CASE("source syntax of values") {
  CHECK(to_source(mk_list({mk_bv32(1), mk_bv32(2)})) == "[1,2]");
  CHECK(to_source(mk_bv64(-3)) == "-3L");
  CHECK(to_source(mk_string("q\"\t")) == "\"q\\\"\\t\"");
  CHECK(to_source(mk_tuple({mk_bv32(1), mk_bool(false)})) == "(1,false)");
  CHECK(to_source(mk_ctor(names::some(), {mk_bv32(7)})) == "some(7)");
  CHECK(to_source(smt_var(mk_string("x"), t_bv(32))) == "`#x[bv[32]]`");
}

TEST_CASE("bit-vector payloads") {
  CHECK(bv_signed(mk_bv32(-1)) == -1);
  CHECK(mk_bv32(-1)->bits == 0xffffffffu);
  CHECK(bv_signed(mk_bv64(INT64_MIN)) == INT64_MIN);
  CHECK(bv_signed(mk_bv(32, 0x80000000u)) == INT32_MIN);
}

TEST_CASE("erase and to_smt") {
  CHECK(type_equal(to_smt_type(t_bool()), t_smt(t_bool())));
  Type list_smt_bool = t_adt(names::list(), {t_smt(t_bool())});
  CHECK(type_equal(erase_type(t_smt(list_smt_bool)), t_adt(names::list(), {t_bool()})));
  CHECK(type_equal(to_smt_type(t_sym(t_bv(32))), t_sym(t_bv(32))));
  CHECK_THROWS_AS(erase_type(t_model()), TypeUndefined);
  CHECK_THROWS_AS(to_smt_type(t_param(Symbol("a"))), TypeUndefined);
  CHECK(type_to_string(t_adt(names::list(), {t_smt(t_bool())})) == "bool smt list");
}

TEST_CASE("type well-formedness by mode") {
  auto l = flg::testkit::load("");
  REQUIRE(l);
  const Program& p = *l.prog;
  CHECK_FALSE(type_well_formed(p, t_model(), Mode::Smt).empty());
  CHECK(type_well_formed(p, t_model(), Mode::Exp).empty());
  CHECK(type_well_formed(p, t_bool(), Mode::Smt).empty());
  Symbol a("a");
  Type bad = t_smt(t_adt(names::list(), {t_param(a)}));
  CHECK_FALSE(type_well_formed(p, bad, Mode::Smt, {a}).empty());
}

TEST_CASE("subkinding and to_smt idempotence on random types") {
  auto l = flg::testkit::load("type 'a box = | box('a)\nuninterpreted sort elem\n");
  REQUIRE(l);
  const Program& p = *l.prog;
  std::mt19937_64 rng(11);
  std::function<Type(int)> gen = [&](int d) -> Type {
    int k = std::uniform_int_distribution<int>(0, d <= 0 ? 4 : 9)(rng);
    switch (k) {
      case 0: return t_bool();
      case 1: return t_bv(32);
      case 2: return t_string();
      case 3: return t_adt(Symbol("elem"));
      case 4: return t_bv(64);
      case 5:
      case 6: {
        Type inner = gen(d - 1);  // smt/sym only wrap pre-types
        if (!is_pre_type(inner)) return inner;
        return k == 5 ? t_smt(inner) : t_sym(inner);
      }
      case 7: return t_model();
      case 8: return t_adt(names::list(), {gen(d - 1)});
      default: return t_adt(Symbol("box"), {gen(d - 1)});
    }
  };
  int smt_ok = 0;
  for (int i = 0; i < 2000; ++i) {
    Type t = gen(3);
    if (!type_well_formed(p, t, Mode::Smt).empty()) continue;
    ++smt_ok;
    CHECK(type_well_formed(p, t, Mode::Exp).empty());
    Type s = to_smt_type(t);
    CHECK(type_equal(to_smt_type(s), s));
  }
  CHECK(smt_ok > 100);
}

TEST_CASE("relations: set semantics, ranges and indices") {
  World w;
  Relation& r = w.relation(Symbol("edge"), 2);
  CHECK(r.insert({mk_bv32(1), mk_bv32(2)}));
  CHECK_FALSE(r.insert({mk_bv32(1), mk_bv32(2)}));
  CHECK(r.insert({mk_bv32(2), mk_bv32(3)}));
  CHECK(r.insert({mk_bv32(1), mk_bv32(3)}));
  CHECK(r.size() == 3);
  r.ensure_index(0b01);
  std::vector<std::uint32_t> rows;
  r.probe(0b01, {mk_bv32(1), nullptr}, 0, r.size(), rows);
  int hits = 0;
  for (auto i : rows) hits += term_equal(r.row(i)[0], mk_bv32(1));
  CHECK(hits == 2);
  rows.clear();
  r.probe(0b01, {mk_bv32(1), nullptr}, 1, r.size(), rows);  // skips row 0
  for (auto i : rows) CHECK(i >= 1);

  World other = w.clone();
  CHECK(other.same_facts(w));
  other.insert(Symbol("edge"), {mk_bv32(9), mk_bv32(9)});
  CHECK_FALSE(other.same_facts(w));
  auto sorted = r.sorted();
  CHECK(to_source(sorted.front()[1]) == "2");
}
