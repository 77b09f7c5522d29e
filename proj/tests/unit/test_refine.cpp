#include "doctest.h"

#include "cogent/kinding.hpp"
#include "cogent/oracle.hpp"
#include "cogent/refine.hpp"
#include "cogent/syntax.hpp"

#include "../support/corpus.hpp"
#include "../support/fixtures.hpp"
#include "../support/preservation.hpp"

using namespace cogent;

namespace {

const Program kEmpty;
const Registry kNoFfi;

TypeRef cell_w() { return parse_type("(rec wr (f u8))"); }
Value cell_v(std::uint64_t n) { return v_record({{"f", v_lit(n, PrimType::U8)}}); }

CorrReport corr(const Value& u, const Store& s, const Value& v, const TypeRef& t) {
  return corr_value(kEmpty, kNoFfi, u, s, v, t);
}

}  // namespace

TEST_CASE("literal and unit correspondence") {
  const Store s;
  const CorrReport r = corr(v_lit(5, PrimType::U8), s, v_lit(5, PrimType::U8), t_prim(PrimType::U8));
  CHECK(r.ok);
  CHECK(r.sets.ro.empty());
  CHECK(r.sets.rw.empty());
  CHECK_FALSE(corr(v_lit(5, PrimType::U8), s, v_lit(6, PrimType::U8), t_prim(PrimType::U8)).ok);
  CHECK(corr(v_unit(), s, v_unit(), t_unit()).ok);
}

TEST_CASE("boxed writable record") {
  Store s;
  const auto p = s.alloc(cell_v(1));
  const CorrReport r = corr(v_ptr(p), s, cell_v(1), cell_w());
  CHECK(r.ok);
  CHECK(r.sets.rw == PtrSet{p});
  CHECK(r.sets.ro.empty());
  const CorrReport ro = corr(v_ptr(p), s, cell_v(1), parse_type("(rec ro (f u8))"));
  CHECK(ro.ok);
  CHECK(ro.sets.ro == PtrSet{p});
}

TEST_CASE("record slots aliasing one writable pointer") {
  Store s;
  const auto p = s.alloc(cell_v(1));
  const TypeRef t = t_record({{"a", cell_w(), false}, {"b", cell_w(), false}}, Mode::Unboxed);
  const CorrReport r = corr(v_record({{"a", v_ptr(p)}, {"b", v_ptr(p)}}), s,
                            v_record({{"a", cell_v(1)}, {"b", cell_v(1)}}), t);
  REQUIRE_FALSE(r.ok);
  CHECK(r.failure->kind == "AliasViolation");
  // Oracle for the list rule: a writable set may not meet the other side at all.
  CHECK_FALSE(disjoint(PtrSet{p}, set_union(PtrSet{}, PtrSet{p})));
}

TEST_CASE("taken fields are not inspected") {
  Store s;
  const auto p = s.alloc(v_record({{"f", v_unit()}}));
  const CorrReport r = corr(v_ptr(p), s, v_record({{"f", v_unit()}}), parse_type("(rec wr (f u8 taken))"));
  CHECK(r.ok);
}

TEST_CASE("read-only record containing a writable pointer") {
  Store s;
  const auto inner = s.alloc(cell_v(1));
  const auto outer = s.alloc(v_record({{"c", v_ptr(inner)}}));
  const TypeRef t = t_record({{"c", cell_w(), false}}, Mode::ReadOnly);
  const CorrReport r = corr(v_ptr(outer), s, v_record({{"c", cell_v(1)}}), t);
  REQUIRE_FALSE(r.ok);
  CHECK(r.failure->kind == "ReadOnlyContainsWritable");
}

TEST_CASE("environment correspondence") {
  Relator rel(kEmpty, kNoFfi);
  Store s;
  CHECK(rel.corr_env({}, s, {}, {}).ok);
  const auto p = s.alloc(cell_v(2));
  const TypeRef ro = parse_type("(rec ro (f u8))");
  const Env u = Env{}.bind("x", v_ptr(p)).bind("y", v_ptr(p));
  const Env v = Env{}.bind("x", cell_v(2)).bind("y", cell_v(2));
  CHECK(rel.corr_env(u, s, v, {{"x", ro}, {"y", ro}}).ok);
  const CorrReport w = rel.corr_env(u, s, v, {{"x", cell_w()}, {"y", cell_w()}});
  REQUIRE_FALSE(w.ok);
  CHECK(w.failure->kind == "AliasViolation");
  const CorrReport m = rel.corr_env(u, s, v, {{"z", ro}});
  REQUIRE_FALSE(m.ok);
  CHECK(m.failure->kind == "MissingBinding");
}

TEST_CASE("single-sided typing") {
  CHECK_FALSE(value_typing_v(kEmpty, kNoFfi, v_lit(300, PrimType::U8), t_prim(PrimType::U8)));
  CHECK(value_typing_v(kEmpty, kNoFfi, v_unit(), t_unit()));
  const Store s;
  const CorrReport d = value_typing_u(kEmpty, kNoFfi, v_ptr(42), s, cell_w());
  REQUIRE_FALSE(d.ok);
  CHECK(d.failure->kind == "DanglingPointer");
}

TEST_CASE("frame_check") {
  Store in;
  const auto p = in.alloc(cell_v(1));
  CHECK(frame_check({p}, in, {p}, in).empty());
  auto leak = frame_check({p}, in, {}, in);
  REQUIRE(leak.size() == 1);
  CHECK(leak[0].kind == "LeakFreedom");
  CHECK(leak[0].ptr == p);
  auto fresh = frame_check({}, in, {p}, in);
  REQUIRE_FALSE(fresh.empty());
  CHECK(fresh[0].kind == "FreshAllocation");
  Store out = in;
  out.at(p) = cell_v(9);
  auto inert = frame_check({}, in, {}, out);
  REQUIRE(inert.size() == 1);
  CHECK(inert[0].kind == "Inertia");
}

TEST_CASE("oracle on put-then-take") {
  const Program p = parse_program(
      "(def main (forall) (fn (r (rec wr (f u8))) (rec wr (f u8))"
      " (take r2 f x (put r f 7u8) (put r2 f (op + x 1u8)))))");
  const Registry reg = builtin_library(p);
  Store s;
  const Value u = lift_value(cell_v(1), cell_w(), s, reg);
  const OracleVerdict v = refinement_oracle(p, reg, "main", {}, cell_v(1), u, s);
  CHECK(v.pass);
  CHECK(v.out.rw == PtrSet{u.as<Value::Ptr>()->id});
  CHECK(v.frame.empty());
  CHECK(v.stats.theorem > 0);
  CHECK(value_to_json(*v.v_result).dump() == R"({"rec":{"f":{"lit":8,"ty":"u8"}}})");
}

TEST_CASE("oracle on a program that frees its argument") {
  const Program p = parse_program(
      "(absdef free_Cell (forall) (fun (rec wr (f u8)) unit))"
      "(def main (forall) (fn (r (rec wr (f u8))) unit (app (funref free_Cell) r)))");
  const Registry reg = builtin_library(p);
  Store s;
  const Value u = lift_value(cell_v(1), cell_w(), s, reg);
  const OracleVerdict v = refinement_oracle(p, reg, "main", {}, cell_v(1), u, s);
  CHECK(v.pass);
  CHECK(v.out.rw.empty());
  CHECK(v.frame.empty());
  CHECK(v.store_out.cells().empty());
}

TEST_CASE("bad FFI implementations are caught") {
  for (const auto& run : testgen::bad_ffi_runs()) {
    CAPTURE(run.name);
    CHECK_FALSE(run.verdict.pass);
    REQUIRE(run.verdict.failure);
    CHECK(run.verdict.failure->kind == run.expected_kind);
  }
}

TEST_CASE("correspondence properties on corpus values") {
  std::uint64_t checked = 0;
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const auto l = testgen::load(path);
    const TypeRef t = l.program.find("main")->signature().fun().arg;
    Relator rel(l.program, l.registry);
    for (const auto& v : testgen::random_inputs(l.program, l.registry, "main", 10, 21)) {
      Store s;
      const Value u = lift_value(v, t, s, l.registry);
      const CorrReport r = rel.corr_value(u, s, v, t);
      REQUIRE(r.ok);
      CHECK(disjoint(r.sets.ro, r.sets.rw));
      // Erasure: both one-sided typings hold with the same sets.
      CHECK(rel.value_typing_v(v, t));
      const CorrReport tu = rel.value_typing_u(u, s, t);
      CHECK(tu.ok);
      CHECK(tu.sets.ro == r.sets.ro);
      CHECK(tu.sets.rw == r.sets.rw);
      // Bang turns every writable pointer read-only.
      const CorrReport b = rel.corr_value(u, s, v, bang_type(t));
      CHECK(b.ok);
      CHECK(b.sets.ro == set_union(r.sets.ro, r.sets.rw));
      CHECK(b.sets.rw.empty());
      // Updates confined to other pointers leave the judgement unchanged.
      Store before = s;
      const auto q = before.alloc(v_lit(1, PrimType::U8));
      Store after = before;
      after.at(q) = v_lit(2, PrimType::U8);
      const auto q2 = after.alloc(v_unit());
      REQUIRE(disjoint(r.sets.rw, PtrSet{q}));
      REQUIRE(frame_check({q}, before, {q, q2}, after).empty());
      const CorrReport moved = rel.corr_value(u, after, v, t);
      CHECK(moved.ok);
      CHECK(moved.sets.ro == r.sets.ro);
      CHECK(moved.sets.rw == r.sets.rw);
      CHECK(disjoint(r.sets.rw, PtrSet{q, q2}));
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("oracle passes across the corpus") {
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const auto l = testgen::load(path);
    for (const auto& v : random_oracle_runs(l.program, l.registry, "main", 5, 17)) {
      if (!v.pass && v.failure) FAIL_CHECK(v.to_json().dump());
      CHECK(v.pass);
      CHECK(v.stats.erasure > 0);
    }
  }
}
