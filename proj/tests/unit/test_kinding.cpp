#include <map>

#include "doctest.h"

#include "cogent/kinding.hpp"
#include "cogent/syntax.hpp"

#include "../support/kind_rules.hpp"
#include "../support/random_types.hpp"

using namespace cogent;

namespace {

const Kind kD = Kind::discard();
const Kind kS = Kind::share();
const Kind kE = Kind::escape();
const Kind kDS = Kind::discard_share();

TypeRef buf(Mode m) { return t_abstract("Buf", {}, m); }

std::map<std::string, std::uint8_t> rule_delta(const KindContext& d) {
  std::map<std::string, std::uint8_t> out;
  for (const auto& [n, k] : d.bindings()) out[n] = k.bits();
  return out;
}

}  // namespace

TEST_CASE("mode kinds") {
  CHECK(mode_kind(Mode::ReadOnly) == kDS);
  CHECK(mode_kind(Mode::Writable) == kE);
  CHECK(mode_kind(Mode::Unboxed) == Kind::all());
}

TEST_CASE("max_kind examples") {
  const KindContext empty;
  CHECK(max_kind(empty, *t_record({{"b1", buf(Mode::Writable), false}}, Mode::Unboxed)) == kE);
  CHECK(max_kind(empty, *t_fun(t_prim(PrimType::U8), t_prim(PrimType::U8))) == Kind::all());
  CHECK(max_kind(empty, *t_record({{"f", t_prim(PrimType::U8), true}}, Mode::Unboxed)) == Kind::all());
  CHECK(max_kind(empty, *t_record({{"f", buf(Mode::Writable), true}}, Mode::Unboxed)) == Kind::all());
  CHECK(max_kind(empty, *t_variant({{"A", t_unit()}, {"B", buf(Mode::ReadOnly)}})) == kDS);
  CHECK_THROWS_AS(max_kind(empty, *t_var("a")), Error);
}

TEST_CASE("kind_check examples") {
  const KindContext empty;
  CHECK(kind_check(empty, *t_prim(PrimType::U32), Kind::all()));
  CHECK_FALSE(kind_check(empty, *t_record({{"b", buf(Mode::Writable), false}}, Mode::Writable), kS));
  const KindContext linear({{"a", Kind::none()}});
  CHECK(kind_check(linear, *t_var("a"), Kind::none()));
  CHECK_FALSE(kind_check(linear, *t_var("a"), kD));
}

TEST_CASE("bang operators") {
  CHECK(bang_mode(Mode::Writable) == Mode::ReadOnly);
  CHECK(bang_mode(Mode::ReadOnly) == Mode::ReadOnly);
  CHECK(bang_mode(Mode::Unboxed) == Mode::Unboxed);
  CHECK(bang_kind(kE) == kDS);
  CHECK(bang_kind(Kind::all()) == Kind::all());
  CHECK(bang_kind(kDS) == kDS);
  CHECK(bang_kind(kD) == kDS);
  const TypeRef f = t_fun(buf(Mode::Writable), t_prim(PrimType::U32));
  CHECK(type_equal(bang_type(f), f));
  CHECK(type_equal(bang_type(t_var("a")), t_observed("a")));
  CHECK(type_equal(bang_type(t_observed("a")), t_observed("a")));
  CHECK(type_equal(bang_type(parse_type("(rec wr (x (rec wr (n u8))) (y (abs Buf wr u8)))")),
                   parse_type("(rec ro (x (rec ro (n u8))) (y (abs Buf ro u8)))")));
}

TEST_CASE("substitution") {
  TypeSubst s{{"a", t_prim(PrimType::U8)}};
  CHECK(type_equal(subst_type(t_fun(t_var("a"), t_observed("a")), s),
                   t_fun(t_prim(PrimType::U8), t_prim(PrimType::U8))));
  TypeSubst b{{"a", buf(Mode::Writable)}};
  CHECK(type_equal(subst_type(t_observed("a"), b), buf(Mode::ReadOnly)));
  const TypeRef g = parse_type("(rec ub (x u8) (y (variant (A unit))))");
  CHECK(type_equal(subst_type(g, {}), g));
  CHECK(type_equal(subst_type(t_var("c"), s), t_var("c")));
}

TEST_CASE("make_subst arity") {
  PolyType p{{{"a", Kind::all()}}, t_fun(t_var("a"), t_var("a"))};
  CHECK_THROWS_AS(make_subst(p, {}), Error);
  CHECK(make_subst(p, {t_unit()}).size() == 1);
}

TEST_CASE("max_kind agrees with the rule checker on random types") {
  testgen::TypeGen gen(2024, {"a", "b", "c"});
  for (int i = 0; i < 2000; ++i) {
    const KindContext delta({{"a", testgen::random_kind(gen.rng())},
                             {"b", testgen::random_kind(gen.rng())},
                             {"c", testgen::random_kind(gen.rng())}});
    const auto rd = rule_delta(delta);
    const TypeRef t = gen.type(1 + i % 6);
    const Kind mk = max_kind(delta, *t);
    for (std::uint8_t bits = 0; bits < 8; ++bits) {
      const bool by_rules = testgen::rule_kinds(rd, *t, bits);
      CHECK(kind_check(delta, *t, Kind(bits)) == by_rules);
      CHECK(Kind(bits).subset_of(mk) == by_rules);
    }
  }
}

TEST_CASE("kinding properties on random types") {
  testgen::TypeGen gen(77, {"a", "b"});
  for (int i = 0; i < 1000; ++i) {
    const KindContext delta({{"a", testgen::random_kind(gen.rng())}, {"b", testgen::random_kind(gen.rng())}});
    const TypeRef t = gen.type(1 + i % 6);
    const TypeRef bt = bang_type(t);
    CHECK(type_equal(bang_type(bt), bt));
    CHECK(kDS.subset_of(max_kind(delta, *bt)));
    for (std::uint8_t bits = 0; bits < 8; ++bits) {
      const Kind k(bits);
      CHECK(bang_kind(bang_kind(k)) == bang_kind(k));
      if (!kind_check(delta, *t, k)) continue;
      for (std::uint8_t sub = 0; sub < 8; ++sub)
        if (Kind(sub).subset_of(k)) CHECK(kind_check(delta, *t, Kind(sub)));
      CHECK(kind_check(delta, *bt, bang_kind(k)));
    }
  }
}

TEST_CASE("instantiation preserves kinds") {
  testgen::TypeGen poly(9, {"a", "b"});
  testgen::TypeGen ground(10, {});
  for (int i = 0; i < 1000; ++i) {
    const TypeRef ra = ground.type(3);
    const TypeRef rb = ground.type(3);
    const KindContext delta({{"a", max_kind({}, *ra)}, {"b", max_kind({}, *rb)}});
    const TypeRef t = poly.type(1 + i % 5);
    const TypeRef st = subst_type(t, {{"a", ra}, {"b", rb}});
    CHECK(is_ground(*st));
    for (std::uint8_t bits = 0; bits < 8; ++bits)
      if (kind_check(delta, *t, Kind(bits))) CHECK(kind_check({}, *st, Kind(bits)));
  }
}

TEST_CASE("kind context rejects duplicate binders") {
  CHECK_THROWS_AS(KindContext({{"a", kD}, {"a", kS}}), Error);
}
