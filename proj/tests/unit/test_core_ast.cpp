#include <algorithm>
#include <random>

#include "doctest.h"

#include "cogent/ast.hpp"
#include "cogent/syntax.hpp"

#include "../support/corpus.hpp"
#include "../support/random_types.hpp"

using namespace cogent;

TEST_CASE("parse identity function") {
  const Program p = parse_program("(def id (forall) (fn (x u32) u32 x))");
  REQUIRE(p.defs().size() == 1);
  const FunDef* f = p.defs()[0].fun();
  REQUIRE(f);
  CHECK(f->param == "x");
  CHECK(f->signature.binders.empty());
  CHECK(type_equal(f->signature.body, t_fun(t_prim(PrimType::U32), t_prim(PrimType::U32))));
}

TEST_CASE("binder kinds") {
  const Program p = parse_program("(def f (forall (a (S))) (fn (x a) a x))");
  const auto& b = p.defs()[0].signature().binders;
  REQUIRE(b.size() == 1);
  CHECK(b[0].first == "a");
  CHECK(b[0].second == Kind::share());
}

TEST_CASE("front-end errors") {
  auto code = [](const char* src) {
    try {
      parse_program(src);
    } catch (const Error& e) {
      return std::string(error_code_name(e.code()));
    }
    return std::string("ok");
  };
  CHECK(code("(def f (forall) (fn (x u8) u8 x)) (def f (forall) (fn (x u8) u8 x))") == "DuplicateDefinition");
  CHECK(code("(def f (forall) (fn (x b) u8 x))") == "UnboundTypeVariable");
  CHECK(code("(def f (forall) (fn (x u8) u8 x)") == "ParseError");
  CHECK(code("(def f (forall (a ()) (a ())) (fn (x u8) u8 x))") == "DuplicateBinder");
  CHECK(code("(def f (forall) (fn (x (variant (A u8) (A u8))) u8 5u8))") == "DuplicateConstructor");
  CHECK(code("(def f (forall) (fn (x (rec ub (a u8) (a u8))) u8 5u8))") == "DuplicateField");
}

TEST_CASE("parse errors carry a span") {
  const std::string src = "(def f (forall) (fn (x u8) u8 (op +)))";
  try {
    parse_program(src);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.span().start > 0);
    CHECK(format_diagnostic("f.cogc", src, e).rfind("f.cogc:1:", 0) == 0);
  }
}

TEST_CASE("tuple sugar is an unboxed record") {
  const ExprRef e = parse_expr("(tuple 1u8 2u16)");
  const auto* s = e->as<ex::Struct>();
  REQUIRE(s);
  REQUIRE(s->fields.size() == 2);
  CHECK(s->fields[0].first == "p1");
  CHECK(s->fields[1].first == "p2");
}

TEST_CASE("variant equality ignores alternative order") {
  // Oracle: compare after sorting alternatives by constructor.
  auto sorted_key = [](std::vector<Alternative> alts) {
    std::sort(alts.begin(), alts.end(), [](const auto& a, const auto& b) { return a.ctor < b.ctor; });
    std::string k;
    for (const auto& a : alts) k += a.ctor + ":" + type_key(*a.type) + ";";
    return k;
  };
  std::vector<Alternative> base = {
      {"A", t_prim(PrimType::U8)}, {"B", t_prim(PrimType::U16)}, {"C", t_unit()}};
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<Alternative> alts(base.begin(), base.begin() + static_cast<long>(n));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do {
      std::vector<Alternative> p;
      for (auto i : perm) p.push_back(alts[i]);
      CHECK(type_equal(t_variant(alts), t_variant(p)) == (sorted_key(alts) == sorted_key(p)));
      CHECK(type_key(*t_variant(alts)) == type_key(*t_variant(p)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  CHECK_FALSE(type_equal(t_variant({{"A", t_prim(PrimType::U8)}}), t_variant({{"A", t_prim(PrimType::U16)}})));
}

TEST_CASE("records compare positionally with taken flags and mode") {
  auto r = [](bool taken, Mode m) { return t_record({{"f", t_prim(PrimType::U8), taken}}, m); };
  CHECK_FALSE(type_equal(r(true, Mode::Unboxed), r(false, Mode::Unboxed)));
  CHECK_FALSE(type_equal(r(false, Mode::Writable), r(false, Mode::Unboxed)));
  const auto ab = t_record({{"a", t_unit(), false}, {"b", t_unit(), false}}, Mode::Unboxed);
  const auto ba = t_record({{"b", t_unit(), false}, {"a", t_unit(), false}}, Mode::Unboxed);
  CHECK_FALSE(type_equal(ab, ba));
  CHECK_FALSE(type_equal(t_fun(t_prim(PrimType::U8), t_prim(PrimType::U8)),
                         t_fun(t_prim(PrimType::U8), t_prim(PrimType::U16))));
}

TEST_CASE("type_equal is an equivalence and agrees with type_key") {
  testgen::TypeGen gen(11, {"a", "b"});
  std::vector<TypeRef> ts;
  for (int i = 0; i < 200; ++i) ts.push_back(gen.type(3));
  for (const auto& x : ts) CHECK(type_equal(x, x));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const bool eq = type_equal(ts[i], ts[j]);
      CHECK(eq == type_equal(ts[j], ts[i]));
      CHECK(eq == (type_key(*ts[i]) == type_key(*ts[j])));
    }
}

TEST_CASE("types round-trip through their printed form") {
  testgen::TypeGen gen(5, {"a", "b"});
  for (int i = 0; i < 500; ++i) {
    const TypeRef t = gen.type(4);
    CHECK(type_equal(parse_type(type_to_string(t)), t));
  }
}

TEST_CASE("free_vars respects binders") {
  auto fv = [](const char* src) { return free_vars(*parse_expr(src)); };
  CHECK(fv("x") == std::set<std::string>{"x"});
  CHECK(fv("(let x y x)") == std::set<std::string>{"y"});
  CHECK(fv("(take x f y r (app x y))") == std::set<std::string>{"r"});
  CHECK(fv("(case v A a (op + a b) rest c)") == std::set<std::string>{"v", "b", "c"});
  CHECK(fv("(letbang (r) n (member r f) (tuple n r))") == std::set<std::string>{"r"});
  CHECK(fv("(app (funref g) z)") == std::set<std::string>{"z"});
}

TEST_CASE("corpus programs round-trip through the printer") {
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const Program p = parse_program(testgen::slurp(path));
    const std::string once = print_program(p);
    const Program q = parse_program(once);
    CHECK(print_program(q) == once);
    REQUIRE(p.defs().size() == q.defs().size());
    for (std::size_t i = 0; i < p.defs().size(); ++i) {
      CHECK(p.defs()[i].name() == q.defs()[i].name());
      CHECK(type_equal(p.defs()[i].signature().body, q.defs()[i].signature().body));
      if (const FunDef* f = p.defs()[i].fun()) {
        const FunDef* g = q.defs()[i].fun();
        REQUIRE(g);
        CHECK(expr_equal(*f->body, *g->body));
        // Function names are FunRefs, so only the parameter can be free.
        const auto fv = free_vars(*f->body);
        CHECK(fv.size() <= 1);
        if (!fv.empty()) CHECK(*fv.begin() == f->param);
      }
    }
  }
}

TEST_CASE("primitive widths") {
  CHECK(prim_bits(PrimType::U8) == 8);
  CHECK(prim_bits(PrimType::U64) == 64);
  CHECK(prim_max_literal(PrimType::U16) == 65535);
  CHECK(prim_max_literal(PrimType::Bool) == 1);
  CHECK(prim_size_le(PrimType::U8, PrimType::U32));
  CHECK_FALSE(prim_size_le(PrimType::U64, PrimType::U32));
}

TEST_CASE("kind serialisation") {
  CHECK(Kind::all().to_string() == "DSE");
  CHECK(Kind::discard_share().to_string() == "DS");
  CHECK(Kind::none().to_string() == "");
  CHECK(Kind(Kind::kDiscard | Kind::kEscape).to_string() == "DE");
}
