#include "doctest.h"

#include "cogent/eval.hpp"
#include "cogent/instance.hpp"
#include "cogent/oracle.hpp"
#include "cogent/passes.hpp"
#include "cogent/syntax.hpp"

#include "../support/corpus.hpp"
#include "../support/preservation.hpp"

using namespace cogent;

namespace {

bool contains_match(const Expr& e) { return print_expr(e).find("(match") != std::string::npos; }

ExprRef desugared(const char* src) {
  std::set<std::string> used = {"v"};
  return desugar_match(parse_expr(src), used);
}

/// Evaluates `fname` of p on a value-semantics argument.
Value run_v(const Program& p, const Registry& reg, const std::string& fname, const Value& arg) {
  return apply_fn_v(p, reg, fname, {}, arg);
}

}  // namespace

TEST_CASE("three-arm match nests cases") {
  const ExprRef e = desugared("(match v (A a a) (B b b) (C c c))");
  const auto* outer = e->as<ex::Case>();
  REQUIRE(outer);
  CHECK(outer->ctor == "A");
  const auto* inner = outer->else_body->as<ex::Case>();
  REQUIRE(inner);
  CHECK(inner->ctor == "B");
  const auto* last = inner->else_body->as<ex::Let>();
  REQUIRE(last);
  CHECK(last->name == "c");
  CHECK(last->bound->is<ex::Esac>());
  CHECK_FALSE(contains_match(*e));
}

TEST_CASE("one-arm match is a let over esac") {
  const ExprRef e = desugared("(match v (Only x x))");
  const auto* l = e->as<ex::Let>();
  REQUIRE(l);
  CHECK(l->name == "x");
  CHECK(l->bound->is<ex::Esac>());
}

TEST_CASE("match errors") {
  CHECK_THROWS_WITH_AS(desugared("(match v (A a a) (A b b))"), doctest::Contains("A"), Error);
  try {
    desugared("(match v (A a a) (A b b))");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateArm);
  }
}

TEST_CASE("desugared else-variables are fresh") {
  std::set<std::string> used = {"v", "v'"};
  const ExprRef e = desugar_match(parse_expr("(match v (A a a) (B b b) (C c c))"), used);
  const auto* outer = e->as<ex::Case>();
  REQUIRE(outer);
  CHECK(outer->else_var != "v");
  CHECK(outer->else_var != "v'");
  CHECK(used.count(outer->else_var));
}

TEST_CASE("a-normalisation binds compound operands") {
  const Program p = parse_program(
      "(def g (forall) (fn (x u8) u8 x))"
      "(def f (forall) (fn (x u8) u8 x))"
      "(def main (forall) (fn (x u8) u8 (app (funref f) (app (funref g) x))))");
  const Program a = a_normalise(p);
  const FunDef* m = a.find("main")->fun();
  REQUIRE(m);
  const auto* l = m->body->as<ex::Let>();
  REQUIRE(l);
  CHECK(l->name.rfind("t", 0) == 0);
  CHECK(l->bound->is<ex::FunRef>());
  const auto* inner = l->body->as<ex::Let>();
  REQUIRE(inner);
  CHECK(inner->bound->is<ex::Let>());
  CHECK(inner->body->is<ex::App>());
  for (const auto& d : a.defs())
    if (d.fun()) CHECK(is_anf(*d.fun()->body));
  require_well_typed(a);
}

TEST_CASE("a-normal forms are fixed points") {
  const Program p = parse_program("(def main (forall) (fn (x u8) u8 (op + x 1u8)))");
  const Program a = a_normalise(p);
  CHECK(expr_equal(*a.find("main")->fun()->body, *p.find("main")->fun()->body));
  const Program twice = a_normalise(a);
  CHECK(print_program(twice) == print_program(a));
}

TEST_CASE("struct fields are bound left to right") {
  const Program p = parse_program(
      "(def main (forall) (fn (x u8) (rec ub (a u8) (b u8))"
      " (struct ((a (op + x 1u8)) (b (op * x 2u8))))))");
  const Program a = a_normalise(p);
  const auto* first = a.find("main")->fun()->body->as<ex::Let>();
  REQUIRE(first);
  CHECK(print_expr(*first->bound).find("+") != std::string::npos);
  const Registry reg = builtin_library(a);
  for (std::uint64_t x : {0ull, 7ull, 200ull})
    CHECK(value_equal(run_v(p, reg, "main", v_lit(x, PrimType::U8)), run_v(a, reg, "main", v_lit(x, PrimType::U8))));
}

TEST_CASE("monomorphise names instances from one counter") {
  const Program p = parse_program(
      "(def id (forall (a (D S E))) (fn (x a) a x))"
      "(def unused (forall (a ())) (fn (x a) a x))"
      "(def main (forall) (fn (x u8) u32"
      " (let y (app (funref id u8) x) (app (funref id u32) (cast u32 y)))))");
  const MonoResult m = monomorphise(p);
  CHECK(m.renames.lookup("id", {t_prim(PrimType::U8)}) == "id_0");
  CHECK(m.renames.lookup("id", {t_prim(PrimType::U32)}) == "id_1");
  CHECK(m.renames.lookup("main", {}) == "main_0");
  CHECK_FALSE(m.program.contains("unused"));
  for (const auto& d : m.program.defs()) CHECK(d.signature().binders.empty());
  CHECK(m.renames.to_json().dump() ==
        R"([{"args":[],"from":"main","to":"main_0"},{"args":["u8"],"from":"id","to":"id_0"},)"
        R"({"args":["u32"],"from":"id","to":"id_1"}])");
  require_well_typed(m.program);
}

TEST_CASE("monomorphise errors") {
  const Program p = parse_program("(def id (forall (a (D S E))) (fn (x a) a x))");
  CHECK_THROWS_AS(monomorphise(p), Error);
  try {
    monomorphise(p, {"id"});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEntryPoint);
  }
  try {
    monomorphise(p, {"nope"});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEntryPoint);
  }
}

TEST_CASE("mono targets avoid names already in the program") {
  const Program p = parse_program(
      "(def main_0 (forall) (fn (x u8) u8 x))"
      "(def main (forall) (fn (x u8) u8 (app (funref main_0) x)))");
  const MonoResult m = monomorphise(p, {"main"});
  CHECK(m.renames.lookup("main", {}) != "main_0");
  std::set<std::string> targets;
  for (const auto& e : m.renames.entries()) CHECK(targets.insert(e.to).second);
}

TEST_CASE("rename maps stay injective") {
  RenameMap r;
  r.add({"f", {}, "f_0"});
  CHECK_THROWS_AS(r.add({"g", {}, "f_0"}), Error);
  CHECK_THROWS_AS(r.add({"f", {}, "f_1"}), Error);
  try {
    r.lookup("h", {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRenameEntry);
  }
}

TEST_CASE("mono_val") {
  const Program p = parse_program(
      "(absdef ext (forall (a (D S E))) (fun a a))"
      "(def id (forall (a (D S E))) (fn (x a) a x))"
      "(def main (forall) (fn (x u8) u8 (app (funref ext u8) (app (funref id u8) x))))");
  const MonoResult m = monomorphise(p);
  CHECK(value_equal(mono_val(m.renames, v_lit(5, PrimType::U8)), v_lit(5, PrimType::U8)));
  const Value af = mono_val(m.renames, Value::AbsFun{"ext", {t_prim(PrimType::U8)}});
  REQUIRE(af.as<Value::AbsFun>());
  CHECK(af.as<Value::AbsFun>()->name == m.renames.lookup("ext", {t_prim(PrimType::U8)}));
  CHECK(af.as<Value::AbsFun>()->type_args.empty());
  Instantiator inst(p);
  const Value fv = inst.function_value("id", {t_prim(PrimType::U8)});
  const Value mf = mono_val(m.renames, fv);
  REQUIRE(mf.as<Value::Fun>());
  CHECK(mf.as<Value::Fun>()->name == m.renames.lookup("id", {t_prim(PrimType::U8)}));
  CHECK(mf.as<Value::Fun>()->type_args.empty());
  CHECK_THROWS_AS(mono_val(m.renames, Value::AbsFun{"ext", {t_unit()}}), Error);
}

TEST_CASE("passes preserve typing and results on the corpus") {
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const auto l = testgen::load(path);
    require_well_typed(l.program);
    const Program anf = a_normalise(l.program);
    require_well_typed(anf);
    const MonoResult mono = monomorphise(l.program, {"main"});
    require_well_typed(mono.program);
    const auto inputs = testgen::random_inputs(l.program, l.registry, "main", 10, 99);
    CHECK(inputs.size() == 10);
    for (const auto& why : testgen::check_preservation(l.program, l.registry, "main", inputs)) FAIL_CHECK(why);
  }
}
