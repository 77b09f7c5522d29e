#include "doctest.h"

#include "cogent/eval.hpp"
#include "cogent/ffi.hpp"
#include "cogent/refine.hpp"
#include "cogent/syntax.hpp"

#include "../support/corpus.hpp"
#include "../support/preservation.hpp"

using namespace cogent;

namespace {

Value eval_src(const std::string& expr, const Env& env = {}) {
  static std::vector<ExprRef> keep;
  keep.push_back(parse_expr(expr));
  const Program p;
  return eval_v(p, Registry{}, env, *keep.back());
}

std::uint64_t lit(const Value& v) { return v.as<Value::Lit>()->value; }

}  // namespace

TEST_CASE("primitive operators wrap") {
  CHECK(lit(eval_src("(op + 2u8 3u8)")) == 5);
  CHECK(lit(eval_src("(op + 250u8 10u8)")) == 4);
  CHECK(lit(eval_src("(op - 0u16 1u16)")) == 65535);
  CHECK(lit(eval_src("(op * 4294967295 2)")) == 4294967294u);
  CHECK(lit(eval_src("(op << 1u8 8u8)")) == 0);
  CHECK(lit(eval_src("(op >> 128u8 7u8)")) == 1);
  CHECK(lit(eval_src("(op ~ 0u16)")) == 65535);
  CHECK(lit(eval_src("(op < 1u8 2u8)")) == 1);
  CHECK(eval_src("(op == 1u8 2u8)").as<Value::Lit>()->type == PrimType::Bool);
  CHECK(lit(eval_src("(op not true)")) == 0);
  CHECK(lit(eval_src("(cast u64 255u8)")) == 255);
  CHECK(eval_src("(cast u64 255u8)").as<Value::Lit>()->type == PrimType::U64);
}

TEST_CASE("apply_primop matches a direct reference") {
  // Oracle: 128-bit arithmetic truncated to the operand width.
  const PrimType ts[] = {PrimType::U8, PrimType::U16, PrimType::U32, PrimType::U64};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 4000; ++i) {
    const PrimType t = ts[i % 4];
    const unsigned bits = prim_bits(t);
    const unsigned __int128 mask = bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
    const std::uint64_t a = rng() & static_cast<std::uint64_t>(mask);
    const std::uint64_t b = (i % 7 == 0 ? rng() % 70 : rng()) & static_cast<std::uint64_t>(mask);
    auto ap = [&](PrimOp op) { return lit(apply_primop(op, {v_lit(a, t), v_lit(b, t)})); };
    CHECK(ap(PrimOp::Add) == static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) + b) & mask));
    CHECK(ap(PrimOp::Sub) == static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) - b) & mask));
    CHECK(ap(PrimOp::Mul) == static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) & mask));
    CHECK(ap(PrimOp::Shl) == (b >= bits ? 0 : static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) << b) & mask)));
    CHECK(ap(PrimOp::Shr) == (b >= bits ? 0 : a >> b));
    if (b != 0) {
      CHECK(ap(PrimOp::Div) == a / b);
      CHECK(ap(PrimOp::Mod) == a % b);
    }
  }
}

TEST_CASE("division by zero raises") {
  CHECK_THROWS_AS(eval_src("(op / 1u8 0u8)"), Error);
  try {
    eval_src("(op % 1u8 0u8)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("put builds a fresh record") {
  const Value r = v_record({{"f", v_lit(1, PrimType::U8)}});
  const Env env = Env{}.bind("r", r);
  const Value out = eval_src("(put r f 9u8)", env);
  CHECK(lit(*record_field(*out.as<Value::Record>(), "f")) == 9);
  CHECK(lit(*record_field(*r.as<Value::Record>(), "f")) == 1);
}

TEST_CASE("case passes a non-matching variant to the else branch") {
  const Env env = Env{}.bind("v", v_con("B", v_lit(3, PrimType::U8)));
  const Value out = eval_src("(case v A a (con Got a) rest rest)", env);
  REQUIRE(out.as<Value::Con>());
  CHECK(out.as<Value::Con>()->ctor == "B");
  CHECK(lit(*out.as<Value::Con>()->payload) == 3);
}

TEST_CASE("take binds record and field") {
  const Env env = Env{}.bind("r", v_record({{"a", v_lit(4, PrimType::U8)}, {"b", v_lit(6, PrimType::U8)}}));
  CHECK(lit(eval_src("(take s a x r (op + x (member s b)))", env)) == 10);
}

TEST_CASE("if and let") {
  CHECK(lit(eval_src("(if true 1u8 2u8)")) == 1);
  CHECK(lit(eval_src("(if false 1u8 2u8)")) == 2);
  CHECK(lit(eval_src("(let x 5u8 (let x (op + x 1u8) x))")) == 6);
}

TEST_CASE("function application") {
  const Program p = parse_program(
      "(def id (forall (a (D S E))) (fn (x a) a x))"
      "(absdef ext (forall) (fun u8 u8))"
      "(absdef missing (forall) (fun u8 u8))");
  Registry reg;
  reg.register_fn({"ext", p.find("ext")->signature(),
                   [](const auto&, const Value& v, const FfiCallbacks&) { return v_lit(lit(v) * 2, PrimType::U8); },
                   [](const auto&, const Value& v, Store&, const FfiCallbacks&) {
                     return v_lit(lit(v) * 2, PrimType::U8);
                   }});
  CHECK(lit(apply_fn_v(p, reg, "id", {t_prim(PrimType::U32)}, v_lit(7, PrimType::U32))) == 7);
  CHECK(lit(apply_fn_v(p, reg, "ext", {}, v_lit(7, PrimType::U8))) == 14);
  try {
    apply_fn_v(p, reg, "missing", {}, v_lit(7, PrimType::U8));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingAbstractImpl);
  }
}

TEST_CASE("fuel bounds evaluation") {
  const Program p = parse_program("(def main (forall) (fn (x u8) u8 (op + x (op + x (op + x x)))))");
  EvalOptions opts;
  opts.fuel = 2;
  try {
    apply_fn_v(p, Registry{}, "main", {}, v_lit(1, PrimType::U8), opts);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FuelExhausted);
  }
}

TEST_CASE("corpus results are pure and well-typed") {
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const auto l = testgen::load(path);
    const TypeRef rt = l.program.find("main")->signature().fun().result;
    for (const auto& in : testgen::random_inputs(l.program, l.registry, "main", 10, 5)) {
      const std::string before = value_to_json(in).dump();
      Value a, b;
      const auto oa = testgen::value_outcome(l.program, l.registry, "main", in, &a);
      const auto ob = testgen::value_outcome(l.program, l.registry, "main", in, &b);
      CHECK(value_to_json(in).dump() == before);
      CHECK(oa == ob);
      CHECK(oa.error != "FuelExhausted");
      if (oa.value) CHECK(value_typing_v(l.program, l.registry, a, rt));
    }
  }
}
