#pragma once

#include <string>

#include "cogent/ffi.hpp"
#include "cogent/oracle.hpp"
#include "cogent/syntax.hpp"

namespace cogent::testgen {

/// Programs whose abstract functions get deliberately wrong update
/// implementations. Each should make the oracle name the violation.
struct BadFfi {
  std::string name;
  std::string expected_kind;
  OracleVerdict verdict;
};

inline const char* kBadFfiSource = R"(
(absdef dup (forall) (fun (rec wr (n u8)) (rec ub (a (rec wr (n u8))) (b (rec wr (n u8))))))
(absdef free_Cell (forall) (fun (rec wr (n u8)) unit))
(absdef touch (forall) (fun (rec wr (n u8)) (rec wr (n u8))))
(def use_dup (forall) (fn (r (rec wr (n u8))) (rec ub (a (rec wr (n u8))) (b (rec wr (n u8))))
  (app (funref dup) r)))
(def use_free (forall) (fn (r (rec wr (n u8))) unit (app (funref free_Cell) r)))
(def use_touch (forall) (fn (r (rec wr (n u8))) (rec wr (n u8)) (app (funref touch) r)))
)";

inline OracleVerdict run_cell(const Program& p, const Registry& reg, const std::string& fname) {
  const Value v = v_record({{"n", v_lit(3, PrimType::U8)}});
  Store s;
  const Value u = lift_value(v, p.find(fname)->signature().fun().arg, s, reg);
  return refinement_oracle(p, reg, fname, {}, v, u, s);
}

inline std::vector<BadFfi> bad_ffi_runs() {
  static const Program p = parse_program(kBadFfiSource);
  Registry reg = builtin_library(p);
  const auto ptr = [](const Value& v) { return v.as<Value::Ptr>()->id; };
  // Writable pointer returned twice.
  reg.register_fn({"dup", p.find("dup")->signature(),
                   [](const auto&, const Value& v, const FfiCallbacks&) { return v_record({{"a", v}, {"b", v}}); },
                   [](const auto&, const Value& u, Store&, const FfiCallbacks&) {
                     return v_record({{"a", u}, {"b", u}});
                   }});
  // Consumes the pointer without freeing it.
  reg.replace_fn({"free_Cell", p.find("free_Cell")->signature(),
                  [](const auto&, const Value&, const FfiCallbacks&) { return v_unit(); },
                  [](const auto&, const Value&, Store&, const FfiCallbacks&) { return v_unit(); }});
  // Frees the cell and hands back the stale pointer.
  reg.register_fn({"touch", p.find("touch")->signature(),
                   [](const auto&, const Value& v, const FfiCallbacks&) { return v; },
                   [ptr](const auto&, const Value& u, Store& s, const FfiCallbacks&) {
                     s.free(ptr(u));
                     return u;
                   }});
  return {{"aliased writable pointer", "AliasViolation", run_cell(p, reg, "use_dup")},
          {"leaked pointer", "LeakFreedom", run_cell(p, reg, "use_free")},
          {"stale freed pointer", "DanglingPointer", run_cell(p, reg, "use_touch")}};
}

}  // namespace cogent::testgen
