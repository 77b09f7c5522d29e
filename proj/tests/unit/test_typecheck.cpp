#include <functional>
#include <set>

#include "doctest.h"

#include "cogent/kinding.hpp"
#include "cogent/syntax.hpp"
#include "cogent/typecheck.hpp"

#include "../support/corpus.hpp"
#include "../support/random_types.hpp"

using namespace cogent;

namespace {

TypeRef u8() { return t_prim(PrimType::U8); }
TypeRef wbuf() { return t_abstract("Buf", {}, Mode::Writable); }

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(error_code_name(e.code()));
  }
  return "ok";
}

Checked check_in(const std::string& prog, const std::vector<CtxBinding>& gamma, const std::string& expr) {
  static std::vector<Program> keep;
  keep.push_back(parse_program(prog));
  static std::vector<ExprRef> exprs;
  exprs.push_back(parse_expr(expr));
  return check_expr(keep.back(), {}, TypeContext(gamma), *exprs.back());
}

void collect_rules(const TypingTree& t, std::set<std::string>& out) {
  out.insert(t.rule);
  for (const auto& c : t.children) collect_rules(c, out);
}

}  // namespace

TEST_CASE("split_context") {
  const KindContext d;
  auto [l, r] = split_context(d, TypeContext({{"x", u8()}}), {"x"}, {"x"});
  CHECK(l.contains("x"));
  CHECK(r.contains("x"));
  CHECK(code_of([&] { split_context(d, TypeContext({{"b", wbuf()}}), {"b"}, {"b"}); }) == "ShareViolation");
  auto [l2, r2] = split_context(d, TypeContext({{"x", u8()}, {"y", u8()}}), {"x"}, {"y"});
  CHECK(l2.names() == std::vector<std::string>{"x"});
  CHECK(r2.names() == std::vector<std::string>{"y"});
  auto [l3, r3] = split_context(d, TypeContext({{"z", wbuf()}}), {}, {});
  CHECK(l3.size() == 0);
  CHECK(r3.size() == 0);
}

TEST_CASE("weaken_context") {
  const KindContext d;
  CHECK(weaken_context(d, TypeContext({{"x", u8()}}), {}).size() == 0);
  CHECK(code_of([&] { weaken_context(d, TypeContext({{"b", wbuf()}}), {}); }) == "DiscardViolation");
  const TypeContext g({{"x", u8()}, {"b", wbuf()}});
  CHECK(weaken_context(d, g, {"x", "b"}).names() == g.names());
}

TEST_CASE("take then put restores the record type") {
  const TypeRef r = parse_type("(rec wr (b1 (abs Buf wr)))");
  const Checked c = check_in("", {{"r", r}}, "(take x b1 y r (put x b1 y))");
  CHECK(type_equal(c.type, r));
  CHECK(c.tree.rule == "Take1");
  CHECK(c.tree.children.at(1).rule == "Put1");
}

TEST_CASE("take of a shareable field leaves it present") {
  const TypeRef r = parse_type("(rec wr (n u32))");
  const Checked c = check_in("", {{"r", r}}, "(take x n y r (put x n (op + y 1)))");
  CHECK(c.tree.rule == "Take2");
  CHECK(c.tree.children.at(1).rule == "Put2");
  CHECK(type_equal(c.type, r));
}

TEST_CASE("typing rule errors") {
  const TypeRef wr = parse_type("(rec wr (b1 (abs Buf wr)))");
  CHECK(code_of([&] { check_in("", {{"r", wr}}, "(member r b1)"); }) == "ShareViolation");
  CHECK(code_of([&] { check_in("", {{"r", parse_type("(rec wr (n u8))")}}, "(member r n)"); }) == "ShareViolation");
  CHECK(code_of([&] { check_in("", {{"v", parse_type("(variant (A u8) (B u8))")}}, "(esac v)"); }) ==
        "NonTotalEsac");
  CHECK(code_of([&] { check_in("", {{"r", parse_type("(rec ro (n u8))")}}, "(put r n 1u8)"); }) ==
        "ReadOnlyWrite");
  CHECK(code_of([&] { check_in("", {{"r", parse_type("(rec ro (n u8))")}}, "(take x n y r y)"); }) ==
        "ReadOnlyWrite");
  CHECK(code_of([&] { check_in("", {}, "256u8"); }) == "LiteralOutOfRange");
  CHECK(code_of([&] { check_in("", {}, "255u8"); }) == "ok");
  CHECK(code_of([&] { check_in("", {{"x", t_prim(PrimType::U32)}}, "(cast u8 x)"); }) == "TypeMismatch");
  CHECK(code_of([&] { check_in("", {{"x", u8()}}, "(cast u64 x)"); }) == "ok");
  CHECK(code_of([&] { check_in("", {{"r", parse_type("(rec ub (a u8))")}}, "(member r z)"); }) == "UnknownField");
  CHECK(code_of([&] { check_in("", {{"v", parse_type("(variant (A u8))")}}, "(case v B b b r 0u8)"); }) ==
        "UnknownConstructor");
  CHECK(code_of([&] { check_in("", {}, "(promote ((A u8)) (con B unit))"); }) == "UnknownConstructor");
}

TEST_CASE("let! with an escapable result") {
  const std::string prog = "(absdef size (forall) (fun (abs Buf ro) u32))";
  const Checked c = check_in(prog, {{"b", wbuf()}},
                             "(letbang (b) ok (op < (app (funref size) b) 10) (tuple ok b))");
  CHECK(c.tree.rule == "LetBang");
  CHECK(type_equal(c.type, parse_type("(rec ub (p1 bool) (p2 (abs Buf wr)))")));
  CHECK(code_of([&] { check_in(prog, {{"b", wbuf()}}, "(letbang (b) o b o)"); }) == "EscapeViolation");
}

TEST_CASE("case narrows the else branch") {
  const Checked c = check_in("", {{"v", parse_type("(variant (A u8) (B u16))")}}, "(case v A a (con B (cast u16 a)) rest rest)");
  CHECK(type_equal(c.type, parse_type("(variant (B u16))")));
  CHECK(c.tree.rule == "Case");
}

TEST_CASE("con yields a single alternative and promote widens it") {
  CHECK(type_equal(check_in("", {}, "(con A 1u8)").type, parse_type("(variant (A u8))")));
  const Checked p = check_in("", {}, "(promote ((A u8) (B unit)) (con A 1u8))");
  CHECK(p.tree.rule == "Prom");
  CHECK(type_equal(p.type, parse_type("(variant (B unit) (A u8))")));
}

TEST_CASE("type arguments must respect binder kinds") {
  const std::string prog = "(def id (forall (a (D S E))) (fn (x a) a x))";
  CHECK(code_of([&] { check_in(prog, {{"x", u8()}}, "(app (funref id u8) x)"); }) == "ok");
  CHECK(code_of([&] { check_in(prog, {{"b", wbuf()}}, "(app (funref id (abs Buf wr)) b)"); }) == "KindViolation");
  CHECK(code_of([&] { check_in(prog, {{"x", u8()}}, "(app (funref id) x)"); }) == "ArityError");
}

TEST_CASE("recursion is rejected") {
  auto rec = [](const char* src) { return check_program(parse_program(src)); };
  const ProgramCheck self = rec("(def f (forall) (fn (x u8) u8 (app (funref f) x)))");
  REQUIRE_FALSE(self.ok());
  CHECK(self.errors[0].code() == ErrorCode::RecursionDetected);
  const ProgramCheck mutual = rec(
      "(def f (forall) (fn (x u8) u8 (app (funref g) x)))"
      "(def g (forall) (fn (x u8) u8 (app (funref f) x)))");
  REQUIRE_FALSE(mutual.ok());
  CHECK(mutual.errors[0].code() == ErrorCode::RecursionDetected);
  CHECK(std::string(mutual.errors[0].what()).find("f") != std::string::npos);
}

TEST_CASE("identity program tree") {
  const ProgramCheck pc = check_program(parse_program("(def id (forall) (fn (x u32) u32 x))"));
  REQUIRE(pc.ok());
  const TypingTree& t = pc.trees.at("id");
  CHECK(t.rule == "Var");
  CHECK(t.children.empty());
}

TEST_CASE("reject corpus yields the expected codes") {
  for (const auto& path : testgen::corpus("reject")) {
    CAPTURE(path.string());
    const std::string text = testgen::slurp(path);
    CHECK(testgen::front_end_code(text) == testgen::expected_code(text));
  }
}

TEST_CASE("accept corpus covers every typing rule") {
  std::set<std::string> seen;
  for (const auto& path : testgen::corpus("accept")) {
    const auto l = testgen::load(path);
    const ProgramCheck pc = check_program(l.program);
    REQUIRE_MESSAGE(pc.ok(), path.string());
    for (const auto& [_, t] : pc.trees) collect_rules(t, seen);
  }
  const std::set<std::string> all = {"App",  "Case",   "Cast",    "Cons", "Esac",   "Fun",  "If",
                                     "Let",  "LetBang", "Literal", "Member", "PrimOp", "Prom", "Put1",
                                     "Put2", "Struct", "Take1",   "Take2", "Unit",   "Var"};
  CHECK(seen == all);
}

TEST_CASE("derivations only weaken discardable and share shareable bindings") {
  for (const auto& path : testgen::corpus("accept")) {
    const auto l = testgen::load(path);
    const ProgramCheck pc = check_program(l.program);
    REQUIRE(pc.ok());
    for (const auto& [name, tree] : pc.trees) {
      CAPTURE(path.string());
      CAPTURE(name);
      const KindContext delta(l.program.find(name)->signature().binders);
      std::function<void(const TypingTree&)> walk = [&](const TypingTree& t) {
        auto type_of = [&](const std::string& n) -> TypeRef {
          for (const auto& b : t.gamma)
            if (b.name == n) return b.type;
          return nullptr;
        };
        for (const auto& w : t.weakened) {
          const TypeRef ty = type_of(w);
          REQUIRE(ty);
          CHECK(kind_check(delta, *ty, Kind::discard()));
        }
        for (const auto& s : t.splits)
          for (const auto& n : s.shared) {
            const TypeRef ty = type_of(n);
            REQUIRE(ty);
            CHECK(kind_check(delta, *ty, Kind::share()));
          }
        for (const auto& c : t.children) walk(c);
      };
      walk(tree);
    }
  }
}

TEST_CASE("checking is deterministic") {
  for (const auto& path : testgen::corpus("accept")) {
    const auto l = testgen::load(path);
    const ProgramCheck a = check_program(l.program);
    const ProgramCheck b = check_program(l.program);
    for (const auto& [name, t] : a.trees)
      CHECK(typing_tree_to_json(t).dump() == typing_tree_to_json(b.trees.at(name)).dump());
  }
}

TEST_CASE("polymorphic corpus functions check at random kind-respecting instances") {
  testgen::TypeGen gen(31, {});
  int instances = 0;
  for (const auto& path : testgen::corpus("accept")) {
    const auto l = testgen::load(path);
    for (const auto& d : l.program.defs()) {
      const FunDef* f = d.fun();
      if (!f || f->signature.binders.empty()) continue;
      for (int round = 0; round < 5; ++round) {
        std::vector<TypeRef> args;
        for (const auto& [_, k] : f->signature.binders) {
          TypeRef t;
          do t = gen.type(3);
          while (!kind_check({}, *t, k));
          args.push_back(t);
        }
        CAPTURE(path.string());
        CAPTURE(f->name);
        const Checked c = check_instance(l.program, *f, args);
        const TypeRef want = subst_type(f->signature.fun().result, make_subst(f->signature, args));
        CHECK(type_equal(c.type, want));
        ++instances;
      }
    }
  }
  CHECK(instances > 0);
}
