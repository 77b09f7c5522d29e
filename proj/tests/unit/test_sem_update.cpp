#include <functional>

#include "doctest.h"

#include "cogent/eval.hpp"
#include "cogent/ffi.hpp"
#include "cogent/oracle.hpp"
#include "cogent/syntax.hpp"

#include "../support/corpus.hpp"
#include "../support/preservation.hpp"

using namespace cogent;

namespace {

std::uint64_t lit(const Value& v) { return v.as<Value::Lit>()->value; }

std::pair<Value, Store> run(const std::string& expr, const Env& env, Store store) {
  static std::vector<ExprRef> keep;
  keep.push_back(parse_expr(expr));
  const Program p;
  return eval_u(p, Registry{}, env, std::move(store), *keep.back());
}

void reachable(const Value& v, const Store& s, std::set<std::uint64_t>& seen) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Value::Ptr>) {
          if (!seen.insert(x.id).second) return;
          REQUIRE(s.find(x.id));
          reachable(s.at(x.id), s, seen);
        } else if constexpr (std::is_same_v<T, Value::Con>) {
          reachable(*x.payload, s, seen);
        } else if constexpr (std::is_same_v<T, Value::Record>) {
          for (const auto& f : x.fields) reachable(f.second, s, seen);
        } else if constexpr (std::is_same_v<T, Value::Abstract>) {
          for (const auto& i : x.items) reachable(i, s, seen);
        }
      },
      v.node);
}

}  // namespace

TEST_CASE("put through a pointer updates the store") {
  Store s;
  const std::uint64_t p = s.alloc(v_record({{"f", v_lit(1, PrimType::U8)}}));
  auto [res, out] = run("(put r f 9u8)", Env{}.bind("r", v_ptr(p)), s);
  REQUIRE(res.as<Value::Ptr>());
  CHECK(res.as<Value::Ptr>()->id == p);
  CHECK(lit(*record_field(*out.at(p).as<Value::Record>(), "f")) == 9);
}

TEST_CASE("take through a pointer binds the pointer and the field") {
  Store s;
  const std::uint64_t p = s.alloc(v_record({{"f", v_lit(4, PrimType::U8)}}));
  auto [res, out] = run("(take x f y r (tuple x y))", Env{}.bind("r", v_ptr(p)), s);
  const auto& rec = *res.as<Value::Record>();
  CHECK(record_field(rec, "p1")->as<Value::Ptr>()->id == p);
  CHECK(lit(*record_field(rec, "p2")) == 4);
  CHECK(store_equal(out, s));
}

TEST_CASE("let leaves the store alone") {
  Store s;
  s.alloc(v_unit());
  auto [res, out] = run("(let x 5u8 x)", Env{}, s);
  CHECK(lit(res) == 5);
  CHECK(store_equal(out, s));
}

TEST_CASE("store primitives") {
  Store s;
  const auto a = s.alloc(v_lit(1, PrimType::U8));
  const auto b = s.alloc(v_lit(2, PrimType::U8));
  CHECK(a != b);
  CHECK(lit(s.at(a)) == 1);
  s.free(a);
  try {
    s.free(a);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DoubleFree);
  }
  try {
    s.at(a);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DanglingPointer);
  }
  const auto c = s.alloc(v_unit());
  CHECK(c > b);
  CHECK(s.next_id() > c);
}

TEST_CASE("store dumps key cells by pointer") {
  Store s;
  s.alloc(v_record({{"f", v_lit(1, PrimType::U8)}}));
  CHECK(store_to_json(s).dump() == R"({"1":{"rec":{"f":{"lit":1,"ty":"u8"}}}})");
}

TEST_CASE("corpus runs keep every reachable pointer live and are deterministic") {
  for (const auto& path : testgen::corpus("accept")) {
    CAPTURE(path.string());
    const auto l = testgen::load(path);
    const auto sig = l.program.find("main")->signature().fun();
    for (const auto& in : testgen::random_inputs(l.program, l.registry, "main", 10, 8)) {
      auto go = [&]() -> std::optional<std::pair<Value, Store>> {
        Store s;
        const Value u = lift_value(in, sig.arg, s, l.registry);
        try {
          return apply_fn_u(l.program, l.registry, "main", {}, u, std::move(s));
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::DivisionByZero);
          return std::nullopt;
        }
      };
      const auto a = go();
      const auto b = go();
      REQUIRE(a.has_value() == b.has_value());
      if (!a) continue;
      CHECK(value_to_json(a->first) == value_to_json(b->first));
      CHECK(store_equal(a->second, b->second));
      std::set<std::uint64_t> seen;
      reachable(a->first, a->second, seen);
    }
  }
}
