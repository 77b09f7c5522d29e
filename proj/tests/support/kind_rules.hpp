#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "cogent/ast.hpp"

namespace cogent::testgen {

/// Decides delta |- t : k one rule at a time, for a fixed k. Shares no code
/// with max_kind.
inline bool rule_kinds(const std::map<std::string, std::uint8_t>& delta, const Type& t, std::uint8_t k) {
  auto within = [](std::uint8_t a, std::uint8_t b) { return (a & ~b) == 0; };
  auto mode_ok = [&](Mode m) {
    switch (m) {
      case Mode::ReadOnly: return within(k, Kind::kDiscard | Kind::kShare);
      case Mode::Writable: return within(k, Kind::kEscape);
      case Mode::Unboxed: return true;
    }
    return false;
  };
  auto var_kind = [&](const std::string& n) {
    auto it = delta.find(n);
    if (it == delta.end()) throw std::out_of_range("unbound " + n);
    return it->second;
  };
  if (t.is<TPrim>() || t.is<TUnit>() || t.is<TFun>()) return true;
  if (const auto* v = t.as<TVar>()) return within(k, var_kind(v->name));
  if (const auto* v = t.as<TVarObserved>()) {
    const std::uint8_t declared = var_kind(v->name);
    const std::uint8_t ds = Kind::kDiscard | Kind::kShare;
    return within(k, within(ds, declared) ? declared : ds);
  }
  if (const auto* v = t.as<TVariant>()) {
    for (const auto& a : v->alts)
      if (!rule_kinds(delta, *a.type, k)) return false;
    return true;
  }
  if (const auto* r = t.as<TRecord>()) {
    if (!mode_ok(r->mode)) return false;
    for (const auto& f : r->fields)
      if (!f.taken && !rule_kinds(delta, *f.type, k)) return false;
    return true;
  }
  const auto& a = *t.as<TAbstract>();
  if (!mode_ok(a.mode)) return false;
  for (const auto& arg : a.args)
    if (!rule_kinds(delta, *arg, k)) return false;
  return true;
}

}  // namespace cogent::testgen
