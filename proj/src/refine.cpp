#include "cogent/refine.hpp"

#include "cogent/kinding.hpp"

namespace cogent {

namespace {

std::string kind_of(const Value& v) {
  static const char* names[] = {"literal", "unit", "function", "abstract function", "variant value",
                                "record", "abstract value", "pointer"};
  return names[v.node.index()];
}

CorrReport shape(const std::string& rule, const std::string& path, const Value& got, const std::string& want) {
  return corr_fail("ShapeMismatch", rule, path, "expected " + want + ", found " + kind_of(got));
}

std::string at(const std::string& path, const std::string& field) { return path + "." + field; }

}  // namespace

bool Relator::body_types(const Value::Fun& f, const TFun& t) {
  const auto key = std::make_pair(f.body.get(), type_key(Type{t}));
  if (auto it = body_memo_.find(key); it != body_memo_.end()) return it->second;
  bool ok = true;
  try {
    check_expr(program_, KindContext{}, TypeContext({{f.param, t.arg}}), *f.body, t.result);
  } catch (const Error&) {
    ok = false;
  }
  body_memo_.emplace(key, ok);
  return ok;
}

CorrReport Relator::relate(const Value* u, const Store* store, const Value* v, const TypeRef& t,
                           const std::string& path) {
  return std::visit(
      [&](const auto& ty) -> CorrReport {
        using T = std::decay_t<decltype(ty)>;
        if constexpr (std::is_same_v<T, TPrim>) {
          const Value::Lit* lits[2] = {u ? u->as<Value::Lit>() : nullptr, v ? v->as<Value::Lit>() : nullptr};
          const Value* sides[2] = {u, v};
          for (int i = 0; i < 2; ++i) {
            if (!sides[i]) continue;
            if (!lits[i]) return shape("RLit", path, *sides[i], "a literal");
            if (lits[i]->type != ty.prim)
              return corr_fail("ShapeMismatch", "RLit", path,
                               "literal of type " + std::string(prim_name(lits[i]->type)) + " at " +
                                   std::string(prim_name(ty.prim)));
            if (lits[i]->value > prim_max_literal(ty.prim))
              return corr_fail("ShapeMismatch", "RLit", path,
                               std::to_string(lits[i]->value) + " exceeds " + std::string(prim_name(ty.prim)));
          }
          if (u && v && lits[0]->value != lits[1]->value)
            return corr_fail("ValueMismatch", "RLit", path,
                             std::to_string(lits[0]->value) + " vs " + std::to_string(lits[1]->value));
          return corr_ok();
        } else if constexpr (std::is_same_v<T, TUnit>) {
          if (u && !u->is<Value::Unit>()) return shape("RUnit", path, *u, "unit");
          if (v && !v->is<Value::Unit>()) return shape("RUnit", path, *v, "unit");
          return corr_ok();
        } else if constexpr (std::is_same_v<T, TFun>) {
          const Value* sides[2] = {u, v};
          for (const Value* s : sides) {
            if (!s) continue;
            if (const auto* f = s->as<Value::Fun>()) {
              if (!body_types(*f, ty))
                return corr_fail("ShapeMismatch", "RFun_C", path,
                                 "body of '" + f->name + "' does not have type " + type_to_string(t));
            } else if (const auto* a = s->as<Value::AbsFun>()) {
              const Def* d = program_.find(a->name);
              bool ok = d && d->abs() && d->signature().binders.size() == a->type_args.size();
              if (ok) ok = type_equal(subst_type(d->signature().body, make_subst(d->signature(), a->type_args)), t);
              if (!ok)
                return corr_fail("ShapeMismatch", "RFun_A", path,
                                 "abstract function '" + a->name + "' does not have type " + type_to_string(t));
            } else {
              return shape("RFun_C", path, *s, "a function");
            }
          }
          if (u && v && !value_equal(*u, *v))
            return corr_fail("ValueMismatch", u->is<Value::Fun>() ? "RFun_C" : "RFun_A", path,
                             "different functions " + value_to_string(*u) + " and " + value_to_string(*v));
          return corr_ok();
        } else if constexpr (std::is_same_v<T, TVariant>) {
          const Value::Con* cons[2] = {u ? u->as<Value::Con>() : nullptr, v ? v->as<Value::Con>() : nullptr};
          const Value* sides[2] = {u, v};
          const Alternative* alt = nullptr;
          for (int i = 0; i < 2; ++i) {
            if (!sides[i]) continue;
            if (!cons[i]) return shape("RVariant", path, *sides[i], "a variant value");
            alt = find_alt(ty, cons[i]->ctor);
            if (!alt)
              return corr_fail("ShapeMismatch", "RVariant", path,
                               "constructor '" + cons[i]->ctor + "' not in " + type_to_string(t));
          }
          if (u && v && cons[0]->ctor != cons[1]->ctor)
            return corr_fail("ValueMismatch", "RVariant", path, cons[0]->ctor + " vs " + cons[1]->ctor);
          return relate(u ? cons[0]->payload.get() : nullptr, store, v ? cons[1]->payload.get() : nullptr,
                        alt->type, path + "<" + alt->ctor + ">");
        } else if constexpr (std::is_same_v<T, TRecord>) {
          const std::string rule = ty.mode == Mode::Unboxed ? "RRec_U" : ty.mode == Mode::Writable ? "RRec_W" : "RRec_R";
          const Value::Record* urec = nullptr;
          std::optional<std::uint64_t> p;
          if (u) {
            const Value* cell = u;
            if (ty.mode != Mode::Unboxed) {
              const auto* ptr = u->as<Value::Ptr>();
              if (!ptr) return shape(rule, path, *u, "a pointer");
              cell = store ? store->find(ptr->id) : nullptr;
              if (!cell)
                return corr_fail("DanglingPointer", rule, path, "pointer " + std::to_string(ptr->id) + " is not allocated");
              p = ptr->id;
            }
            urec = cell->as<Value::Record>();
            if (!urec) return shape(rule, path, *cell, "a record");
          }
          const Value::Record* vrec = nullptr;
          if (v) {
            vrec = v->as<Value::Record>();
            if (!vrec) return shape(rule, path, *v, "a record");
          }
          for (const Value::Record* r : {urec, vrec}) {
            if (!r) continue;
            bool same = r->fields.size() == ty.fields.size();
            for (std::size_t i = 0; same && i < ty.fields.size(); ++i) same = r->fields[i].first == ty.fields[i].name;
            if (!same) return corr_fail("ShapeMismatch", rule, path, "record slots do not match " + type_to_string(t));
          }
          CorrReport acc = corr_ok();
          for (std::size_t i = 0; i < ty.fields.size(); ++i) {
            const FieldType& f = ty.fields[i];
            if (f.taken) continue;
            const std::string fp = at(path, f.name);
            if (!corr_join(acc,
                           relate(urec ? &urec->fields[i].second : nullptr, store,
                                  vrec ? &vrec->fields[i].second : nullptr, f.type, fp),
                           "RL", fp))
              return acc;
          }
          if (ty.mode == Mode::ReadOnly && !acc.sets.rw.empty())
            return corr_fail("ReadOnlyContainsWritable", rule, path,
                             "read-only record reaches writable pointer " + std::to_string(*acc.sets.rw.begin()));
          if (p) {
            if (ty.mode == Mode::Writable) {
              if (acc.sets.ro.count(*p) || acc.sets.rw.count(*p))
                return corr_fail("AliasViolation", rule, path,
                                 "writable pointer " + std::to_string(*p) + " reachable from its own fields");
              acc.sets.rw.insert(*p);
            } else {
              acc.sets.ro.insert(*p);
            }
          }
          return acc;
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          const AbstractTypeSpec* spec = registry_.find_type(ty.name);
          if (!spec) return corr_fail("ShapeMismatch", "RA", path, "no registration for abstract type '" + ty.name + "'");
          ElemRelate elem = [this, store](const Value* eu, const Value* ev, const TypeRef& et, const std::string& ep) {
            return relate(eu, store, ev, et, ep);
          };
          return spec->relate(AbsRelateArgs{u, store, v, ty.args, ty.mode, elem, path});
        } else {
          return corr_fail("ShapeMismatch", "R", path, "type " + type_to_string(t) + " is not ground");
        }
      },
      t->node);
}

CorrReport Relator::relate_env(const Env* u, const Store* store, const Env* v, const std::vector<CtxBinding>& gamma) {
  CorrReport acc = corr_ok();
  for (const auto& b : gamma) {
    const Value* uv = u ? u->lookup(b.name) : nullptr;
    const Value* vv = v ? v->lookup(b.name) : nullptr;
    if ((u && !uv) || (v && !vv)) return corr_fail("MissingBinding", "REnv", b.name, "no value bound to '" + b.name + "'");
    if (!corr_join(acc, relate(uv, store, vv, b.type, b.name), "REnv", b.name)) return acc;
  }
  return acc;
}

CorrReport Relator::corr_value(const Value& u, const Store& store, const Value& v, const TypeRef& t) {
  return relate(&u, &store, &v, t, "$");
}

CorrReport Relator::corr_env(const Env& u, const Store& store, const Env& v, const std::vector<CtxBinding>& gamma) {
  return relate_env(&u, &store, &v, gamma);
}

bool Relator::value_typing_v(const Value& v, const TypeRef& t, std::string* why) {
  CorrReport r = relate(nullptr, nullptr, &v, t, "$");
  if (!r.ok && why) *why = r.failure->reason;
  return r.ok;
}

CorrReport Relator::value_typing_u(const Value& u, const Store& store, const TypeRef& t) {
  return relate(&u, &store, nullptr, t, "$");
}

CorrReport Relator::env_typing_u(const Env& u, const Store& store, const std::vector<CtxBinding>& gamma) {
  return relate_env(&u, &store, nullptr, gamma);
}

bool Relator::env_typing_v(const Env& v, const std::vector<CtxBinding>& gamma, std::string* why) {
  CorrReport r = relate_env(nullptr, nullptr, &v, gamma);
  if (!r.ok && why) *why = r.failure->reason;
  return r.ok;
}

CorrReport corr_value(const Program& program, const Registry& registry, const Value& u, const Store& store,
                      const Value& v, const TypeRef& t) {
  return Relator(program, registry).corr_value(u, store, v, t);
}

bool value_typing_v(const Program& program, const Registry& registry, const Value& v, const TypeRef& t) {
  return Relator(program, registry).value_typing_v(v, t);
}

CorrReport value_typing_u(const Program& program, const Registry& registry, const Value& u, const Store& store,
                          const TypeRef& t) {
  return Relator(program, registry).value_typing_u(u, store, t);
}

std::vector<FrameViolation> frame_check(const PtrSet& w_in, const Store& in, const PtrSet& w_out, const Store& out) {
  PtrSet all = set_union(w_in, w_out);
  for (const auto& [p, _] : in.cells()) all.insert(p);
  for (const auto& [p, _] : out.cells()) all.insert(p);
  std::vector<FrameViolation> out_v;
  for (std::uint64_t p : all) {
    const bool wi = w_in.count(p) > 0;
    const bool wo = w_out.count(p) > 0;
    const Value* a = in.find(p);
    const Value* b = out.find(p);
    if (!wi && !wo) {
      if ((a == nullptr) != (b == nullptr) || (a && !value_equal(*a, *b))) out_v.push_back({"Inertia", p});
    } else if (wi && !wo) {
      if (b) out_v.push_back({"LeakFreedom", p});
    } else if (!wi && wo) {
      if (a) out_v.push_back({"FreshAllocation", p});
    }
  }
  return out_v;
}

nlohmann::json frame_violations_json(const std::vector<FrameViolation>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : vs) out.push_back({{"kind", v.kind}, {"ptr", v.ptr}});
  return out;
}

}  // namespace cogent
