#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogent/codegen.hpp"
#include "cogent/eval.hpp"
#include "cogent/instance.hpp"
#include "cogent/oracle.hpp"
#include "cogent/passes.hpp"

namespace cogent::testgen {

/// Random value-semantics arguments for `fname`.
inline std::vector<Value> random_inputs(const Program& p, const Registry& reg, const std::string& fname,
                                        std::size_t n, std::uint64_t seed) {
  Instantiator inst(p);
  ValueGenerator gen(p, reg, inst, seed);
  const TypeRef arg = p.find(fname)->signature().fun().arg;
  std::vector<Value> out;
  for (std::size_t i = 0; i < n; ++i)
    if (auto v = gen.generate(arg)) out.push_back(*v);
  return out;
}

/// A result or the runtime error code that replaced it.
struct Outcome {
  std::optional<nlohmann::json> value;
  std::string error;

  bool operator==(const Outcome& o) const { return value == o.value && error == o.error; }
  std::string show() const { return value ? value->dump() : "error " + error; }
};

inline Outcome value_outcome(const Program& p, const Registry& reg, const std::string& fname, const Value& arg,
                             Value* raw = nullptr) {
  try {
    Value r = apply_fn_v(p, reg, fname, {}, arg);
    if (raw) *raw = r;
    return {value_to_json(r), ""};
  } catch (const Error& e) {
    return {std::nullopt, std::string(error_code_name(e.code()))};
  }
}

/// Update-semantics result, canonicalised so stores compare up to renaming.
inline Outcome update_outcome(const Program& p, const Registry& reg, const std::string& fname, const Value& arg) {
  const TypeRef t = p.find(fname)->signature().fun().arg;
  const TypeRef rt = p.find(fname)->signature().fun().result;
  try {
    Store store;
    const Value u = lift_value(arg, t, store, reg);
    auto [res, out] = apply_fn_u(p, reg, fname, {}, u, std::move(store));
    return {canonical_result(res, out, rt), ""};
  } catch (const Error& e) {
    return {std::nullopt, std::string(error_code_name(e.code()))};
  }
}

/// Mismatch descriptions; empty when every check held.
inline std::vector<std::string> check_preservation(const Program& p, const Registry& reg, const std::string& fname,
                                                   const std::vector<Value>& inputs) {
  std::vector<std::string> bad;
  const Program anf = a_normalise(p);
  // Every monomorphic definition is a root, so function-valued inputs have instances.
  const MonoResult mono = monomorphise(p);
  const std::string mname = mono.renames.lookup(fname, {});
  const Registry mreg = builtin_library(mono.program);
  for (const auto& in : inputs) {
    const std::string tag = value_to_json(in).dump();
    Value raw;
    const Outcome v0 = value_outcome(p, reg, fname, in, &raw);
    const Outcome v1 = value_outcome(anf, reg, fname, in);
    if (!(v0 == v1)) bad.push_back("anf/value on " + tag + ": " + v0.show() + " vs " + v1.show());
    const Outcome u0 = update_outcome(p, reg, fname, in);
    const Outcome u1 = update_outcome(anf, reg, fname, in);
    if (!(u0 == u1)) bad.push_back("anf/update on " + tag + ": " + u0.show() + " vs " + u1.show());
    Value mres;
    const Outcome m = value_outcome(mono.program, mreg, mname, mono_val(mono.renames, in), &mres);
    Outcome expect = v0;
    if (v0.value) expect.value = value_to_json(mono_val(mono.renames, raw));
    if (!(m == expect)) bad.push_back("mono on " + tag + ": " + m.show() + " vs " + expect.show());
  }
  return bad;
}

}  // namespace cogent::testgen
