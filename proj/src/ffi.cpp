#include "cogent/ffi.hpp"

#include "cogent/kinding.hpp"
#include "cogent/syntax.hpp"

namespace cogent {

void Registry::register_type(AbstractTypeSpec spec) {
  const std::string name = spec.name;
  if (!types_.emplace(name, std::move(spec)).second)
    throw Error(ErrorCode::DuplicateRegistration, "abstract type '" + name + "' registered twice");
}

void Registry::register_fn(AbstractFnSpec spec) {
  const std::string name = spec.name;
  if (!fns_.emplace(name, std::move(spec)).second)
    throw Error(ErrorCode::DuplicateRegistration, "abstract function '" + name + "' registered twice");
}

void Registry::replace_fn(AbstractFnSpec spec) {
  const std::string name = spec.name;
  fns_.insert_or_assign(name, std::move(spec));
}

const AbstractTypeSpec* Registry::find_type(std::string_view name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &it->second;
}

const AbstractFnSpec* Registry::find_fn(std::string_view name) const {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

const AbstractTypeSpec& Registry::lookup_type(std::string_view name) const {
  if (const auto* s = find_type(name)) return *s;
  throw Error(ErrorCode::UnknownAbstract, "unknown abstract type '" + std::string(name) + "'");
}

const AbstractFnSpec& Registry::lookup_fn(std::string_view name) const {
  if (const auto* s = find_fn(name)) return *s;
  throw Error(ErrorCode::UnknownAbstract, "unknown abstract function '" + std::string(name) + "'");
}

Value zero_value(const TypeRef& t) {
  if (const auto* p = t->as<TPrim>()) return v_lit(0, p->prim);
  if (const auto* v = t->as<TVariant>()) {
    if (v->alts.empty()) return v_unit();
    return v_con(v->alts.front().ctor, zero_value(v->alts.front().type));
  }
  if (const auto* r = t->as<TRecord>(); r && r->mode == Mode::Unboxed) {
    std::vector<std::pair<std::string, Value>> fields;
    for (const auto& f : r->fields) fields.emplace_back(f.name, f.taken ? v_unit() : zero_value(f.type));
    return v_record(std::move(fields));
  }
  return v_unit();
}

namespace {

constexpr const char* kWordArray = "WordArray";
/// Largest length wordarray_create accepts; larger requests report Err.
constexpr std::uint64_t kMaxWordArray = 1u << 16;

const char* kDecls = R"((absdef wordarray_create (forall (t (D S E)))
  (fun u32 (variant (Ok (abs WordArray wr t)) (Err unit))))
(absdef wordarray_free (forall (t (D S E))) (fun (abs WordArray wr t) unit))
(absdef wordarray_length (forall (t (D S E))) (fun (abs WordArray ro t) u32))
(absdef wordarray_get (forall (t (D S E)))
  (fun (rec ub (arr (abs WordArray ro t)) (idx u32)) (variant (Ok t) (Err unit))))
(absdef wordarray_put (forall (t (D S E)))
  (fun (rec ub (arr (abs WordArray wr t)) (idx u32) (val t))
       (variant (Ok (abs WordArray wr t)) (Err (abs WordArray wr t)))))
(absdef wordarray_map_no_break (forall (t (D S E)) (u ()))
  (fun (rec ub (arr (abs WordArray wr t)) (f (fun (rec ub (elem t) (acc u)) (rec ub (elem t) (acc u)))) (acc u))
       (rec ub (arr (abs WordArray wr t)) (acc u))))
)";

PrimType elem_prim(const std::vector<TypeRef>& targs) {
  const auto* p = targs.at(0)->as<TPrim>();
  if (!p)
    throw Error(ErrorCode::UnsupportedConstruct,
                "WordArray elements must be primitive, found " + type_to_string(targs[0]));
  return p->prim;
}

const Value& field(const Value& rec, std::string_view name) {
  const auto* r = rec.as<Value::Record>();
  const Value* f = r ? record_field(*r, name) : nullptr;
  if (!f) throw Error(ErrorCode::StuckError, "FFI argument lacks field '" + std::string(name) + "'");
  return *f;
}

const Value::Abstract& array_v(const Value& v) {
  const auto* a = v.as<Value::Abstract>();
  if (!a || a->tag != kWordArray) throw Error(ErrorCode::StuckError, "expected a WordArray value");
  return *a;
}

std::uint64_t ptr_of(const Value& v) {
  const auto* p = v.as<Value::Ptr>();
  if (!p) throw Error(ErrorCode::StuckError, "expected a pointer");
  return p->id;
}

Value::Abstract& array_u(Store& store, const Value& v) {
  auto* a = store.at(ptr_of(v)).as<Value::Abstract>();
  if (!a || a->tag != kWordArray) throw Error(ErrorCode::StuckError, "pointer does not reference a WordArray");
  return *a;
}

std::uint64_t index_of(const Value& v) { return v.as<Value::Lit>()->value; }

CorrReport wordarray_relate(const AbsRelateArgs& a) {
  const std::string rule = a.mode == Mode::Unboxed ? "RA_U" : a.mode == Mode::Writable ? "RA_W" : "RA_R";
  const Value::Abstract* ua = nullptr;
  const Value::Abstract* va = nullptr;
  std::optional<std::uint64_t> p;
  if (a.u) {
    const Value* cell = a.u;
    if (a.mode != Mode::Unboxed) {
      const auto* ptr = a.u->as<Value::Ptr>();
      if (!ptr) return corr_fail("ShapeMismatch", rule, a.path, "expected a pointer to a WordArray");
      cell = a.store ? a.store->find(ptr->id) : nullptr;
      if (!cell) return corr_fail("DanglingPointer", rule, a.path, "pointer " + std::to_string(ptr->id) + " is not allocated");
      p = ptr->id;
    }
    ua = cell->as<Value::Abstract>();
    if (!ua || ua->tag != kWordArray) return corr_fail("ShapeMismatch", rule, a.path, "expected WordArray contents");
  }
  if (a.v) {
    va = a.v->as<Value::Abstract>();
    if (!va || va->tag != kWordArray) return corr_fail("ShapeMismatch", rule, a.path, "expected a WordArray value");
  }
  if (ua && va && ua->items.size() != va->items.size())
    return corr_fail("ValueMismatch", rule, a.path,
                     "lengths differ: " + std::to_string(ua->items.size()) + " vs " + std::to_string(va->items.size()));
  if (a.type_args.size() != 1) return corr_fail("ShapeMismatch", rule, a.path, "WordArray takes one type argument");
  const std::size_t n = ua ? ua->items.size() : va->items.size();
  CorrReport acc = corr_ok();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = a.path + "[" + std::to_string(i) + "]";
    if (!corr_join(acc, a.elem(ua ? &ua->items[i] : nullptr, va ? &va->items[i] : nullptr, a.type_args[0], path),
                   rule, path))
      return acc;
  }
  if (a.mode == Mode::ReadOnly && !acc.sets.rw.empty())
    return corr_fail("ReadOnlyContainsWritable", rule, a.path, "read-only array holds writable pointers");
  if (p) {
    if (acc.sets.ro.count(*p) || acc.sets.rw.count(*p))
      return corr_fail("AliasViolation", rule, a.path, "array pointer reachable from its own elements");
    (a.mode == Mode::Writable ? acc.sets.rw : acc.sets.ro).insert(*p);
  }
  return acc;
}

void register_wordarray(Registry& reg) {
  AbstractTypeSpec ty;
  ty.name = kWordArray;
  ty.arity = 1;
  ty.relate = wordarray_relate;
  ty.zero = [](const std::vector<TypeRef>&) { return Value{Value::Abstract{kWordArray, {}}}; };
  ty.generate = [](const std::vector<TypeRef>& targs, std::mt19937_64& rng, const ValueGen& gen) {
    Value::Abstract a{kWordArray, {}};
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
    for (std::size_t i = 0; i < n; ++i) a.items.push_back(gen(targs.at(0)));
    return Value{std::move(a)};
  };
  reg.register_type(std::move(ty));

  const Program decls = parse_program(kDecls);
  auto sig = [&](const char* name) { return decls.find(name)->signature(); };

  reg.register_fn({"wordarray_create", sig("wordarray_create"),
                   [](const std::vector<TypeRef>& targs, const Value& arg, const FfiCallbacks&) {
                     const PrimType t = elem_prim(targs);
                     const std::uint64_t n = index_of(arg);
                     if (n > kMaxWordArray) return v_con("Err", v_unit());
                     return v_con("Ok", Value{Value::Abstract{kWordArray, std::vector<Value>(n, v_lit(0, t))}});
                   },
                   [](const std::vector<TypeRef>& targs, const Value& arg, Store& store, const FfiCallbacks&) {
                     const PrimType t = elem_prim(targs);
                     const std::uint64_t n = index_of(arg);
                     if (n > kMaxWordArray) return v_con("Err", v_unit());
                     return v_con("Ok", v_ptr(store.alloc(
                                            Value{Value::Abstract{kWordArray, std::vector<Value>(n, v_lit(0, t))}})));
                   }});
  reg.register_fn({"wordarray_free", sig("wordarray_free"),
                   [](const std::vector<TypeRef>&, const Value&, const FfiCallbacks&) { return v_unit(); },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks&) {
                     store.free(ptr_of(arg));
                     return v_unit();
                   }});
  reg.register_fn({"wordarray_length", sig("wordarray_length"),
                   [](const std::vector<TypeRef>&, const Value& arg, const FfiCallbacks&) {
                     return v_lit(array_v(arg).items.size(), PrimType::U32);
                   },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks&) {
                     return v_lit(array_u(store, arg).items.size(), PrimType::U32);
                   }});
  reg.register_fn({"wordarray_get", sig("wordarray_get"),
                   [](const std::vector<TypeRef>&, const Value& arg, const FfiCallbacks&) {
                     const auto& a = array_v(field(arg, "arr"));
                     const std::uint64_t i = index_of(field(arg, "idx"));
                     return i < a.items.size() ? v_con("Ok", a.items[i]) : v_con("Err", v_unit());
                   },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks&) {
                     const auto& a = array_u(store, field(arg, "arr"));
                     const std::uint64_t i = index_of(field(arg, "idx"));
                     return i < a.items.size() ? v_con("Ok", a.items[i]) : v_con("Err", v_unit());
                   }});
  reg.register_fn({"wordarray_put", sig("wordarray_put"),
                   [](const std::vector<TypeRef>&, const Value& arg, const FfiCallbacks&) {
                     const Value& arr = field(arg, "arr");
                     Value::Abstract a = array_v(arr);
                     const std::uint64_t i = index_of(field(arg, "idx"));
                     if (i >= a.items.size()) return v_con("Err", arr);
                     a.items[i] = field(arg, "val");
                     return v_con("Ok", Value{std::move(a)});
                   },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks&) {
                     const Value& arr = field(arg, "arr");
                     auto& a = array_u(store, arr);
                     const std::uint64_t i = index_of(field(arg, "idx"));
                     if (i >= a.items.size()) return v_con("Err", arr);
                     a.items[i] = field(arg, "val");
                     return v_con("Ok", arr);
                   }});
  reg.register_fn({"wordarray_map_no_break", sig("wordarray_map_no_break"),
                   [](const std::vector<TypeRef>&, const Value& arg, const FfiCallbacks& cb) {
                     Value::Abstract a = array_v(field(arg, "arr"));
                     const Value& f = field(arg, "f");
                     Value acc = field(arg, "acc");
                     for (auto& item : a.items) {
                       Value r = cb.apply_v(f, v_record({{"elem", item}, {"acc", acc}}));
                       item = field(r, "elem");
                       acc = field(r, "acc");
                     }
                     return v_record({{"arr", Value{std::move(a)}}, {"acc", std::move(acc)}});
                   },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks& cb) {
                     const Value& arr = field(arg, "arr");
                     const Value& f = field(arg, "f");
                     Value acc = field(arg, "acc");
                     const std::size_t n = array_u(store, arr).items.size();
                     for (std::size_t i = 0; i < n; ++i) {
                       Value item = array_u(store, arr).items[i];
                       Value r = cb.apply_u(f, v_record({{"elem", std::move(item)}, {"acc", acc}}), store);
                       array_u(store, arr).items[i] = field(r, "elem");
                       acc = field(r, "acc");
                     }
                     return v_record({{"arr", arr}, {"acc", std::move(acc)}});
                   }});
}

[[noreturn]] void bad_shape(const AbsFunDecl& d, const std::string& why) {
  throw Error(ErrorCode::SignatureMismatch, "'" + d.name + "' " + why + ": " + type_to_string(d.signature.body));
}

void register_alloc(Registry& reg, const std::string& name, const AbsFunDecl& d) {
  const TFun& f = d.signature.fun();
  const auto* rec = f.result->as<TRecord>();
  if (!f.arg->is<TUnit>() || !rec || rec->mode != Mode::Writable)
    bad_shape(d, "must have type (fun unit (rec wr ...))");
  std::vector<std::string> names;
  for (const auto& fld : rec->fields) {
    if (!fld.taken) bad_shape(d, "must return a record with every field taken");
    names.push_back(fld.name);
  }
  auto slots = [names] {
    std::vector<std::pair<std::string, Value>> fields;
    for (const auto& n : names) fields.emplace_back(n, v_unit());
    return v_record(std::move(fields));
  };
  reg.register_fn({name, d.signature,
                   [slots](const std::vector<TypeRef>&, const Value&, const FfiCallbacks&) { return slots(); },
                   [slots](const std::vector<TypeRef>&, const Value&, Store& store, const FfiCallbacks&) {
                     return v_ptr(store.alloc(slots()));
                   }});
}

void register_free(Registry& reg, const std::string& name, const AbsFunDecl& d) {
  const TFun& f = d.signature.fun();
  const auto* rec = f.arg->as<TRecord>();
  if (!f.result->is<TUnit>() || !rec || rec->mode != Mode::Writable)
    bad_shape(d, "must have type (fun (rec wr ...) unit)");
  const KindContext delta(d.signature.binders);
  for (const auto& fld : rec->fields)
    if (!fld.taken && !kind_check(delta, *fld.type, Kind::discard()))
      bad_shape(d, "would drop the non-discardable field '" + fld.name + "'");
  reg.register_fn({name, d.signature,
                   [](const std::vector<TypeRef>&, const Value&, const FfiCallbacks&) { return v_unit(); },
                   [](const std::vector<TypeRef>&, const Value& arg, Store& store, const FfiCallbacks&) {
                     store.free(ptr_of(arg));
                     return v_unit();
                   }});
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

bool same_poly(const PolyType& a, const PolyType& b) {
  if (a.binders.size() != b.binders.size()) return false;
  TypeSubst rename;
  for (std::size_t i = 0; i < a.binders.size(); ++i) {
    if (!(a.binders[i].second == b.binders[i].second)) return false;
    rename.emplace(a.binders[i].first, t_var(b.binders[i].first));
  }
  return type_equal(subst_type(a.body, rename), b.body);
}

}  // namespace

const std::string& builtin_declarations() {
  static const std::string s = kDecls;
  return s;
}

Registry builtin_library(const Program& program) {
  Registry reg;
  register_wordarray(reg);
  for (const auto& def : program.defs()) {
    const AbsFunDecl* d = def.abs();
    if (!d) continue;
    // Monomorphic copies resolve to their original's registration.
    if (d->instance_of) continue;
    if (starts_with(d->name, "alloc_")) register_alloc(reg, d->name, *d);
    else if (starts_with(d->name, "free_")) register_free(reg, d->name, *d);
  }
  // A specialised allocator whose polymorphic original is gone.
  for (const auto& def : program.defs()) {
    const AbsFunDecl* d = def.abs();
    if (!d || !d->instance_of || program.find(d->instance_of->name) || reg.find_fn(d->instance_of->name)) continue;
    AbsFunDecl mono = *d;
    mono.instance_of.reset();
    if (starts_with(d->instance_of->name, "alloc_")) register_alloc(reg, d->instance_of->name, mono);
    else if (starts_with(d->instance_of->name, "free_")) register_free(reg, d->instance_of->name, mono);
  }
  return reg;
}

AbsInstance abstract_target(const Program& program, const std::string& name, const std::vector<TypeRef>& type_args) {
  if (const Def* def = program.find(name))
    if (const AbsFunDecl* d = def->abs(); d && d->instance_of) return *d->instance_of;
  return AbsInstance{name, type_args};
}

void check_abstract_signatures(const Registry& registry, const Program& program) {
  for (const auto& def : program.defs()) {
    const AbsFunDecl* d = def.abs();
    if (!d) continue;
    const std::string target = d->instance_of ? d->instance_of->name : d->name;
    const AbstractFnSpec* spec = registry.find_fn(target);
    if (!spec) continue;
    bool ok = false;
    if (d->instance_of) {
      const PolyType& reg_sig = spec->signature;
      if (reg_sig.binders.size() == d->instance_of->type_args.size() && d->signature.binders.empty()) {
        const TypeRef expected = subst_type(reg_sig.body, make_subst(reg_sig, d->instance_of->type_args));
        ok = type_equal(expected, d->signature.body);
      }
    } else {
      ok = same_poly(d->signature, spec->signature);
    }
    if (!ok)
      throw Error(ErrorCode::SignatureMismatch,
                  "declaration of '" + d->name + "' does not match the registered signature of '" + target + "'",
                  def.span);
  }
}

}  // namespace cogent
