#include "cogent/eval.hpp"

#include <cstdlib>

namespace cogent {

std::uint64_t default_fuel() {
  if (const char* s = std::getenv("COGC_FUEL")) {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && n > 0) return n;
  }
  return 10'000'000;
}

namespace {

std::uint64_t mask(PrimType t) {
  const unsigned bits = prim_bits(t);
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

const Value::Lit& lit(const Value& v, const Expr& e) {
  const auto* l = v.as<Value::Lit>();
  if (!l) throw Error(ErrorCode::StuckError, "expected a literal, found " + value_to_string(v), e.span);
  return *l;
}

[[noreturn]] void stuck(const Expr& e, const std::string& why) { throw Error(ErrorCode::StuckError, why, e.span); }

const Value::Record& record_of(const Value& v, const Expr& e) {
  const auto* r = v.as<Value::Record>();
  if (!r) stuck(e, "expected a record, found " + value_to_string(v));
  return *r;
}

const Value& field_of(const Value::Record& r, const std::string& f, const Expr& e) {
  const Value* v = record_field(r, f);
  if (!v) stuck(e, "record lacks field '" + f + "'");
  return *v;
}

Value with_field(const Value::Record& r, const std::string& f, Value v, const Expr& e) {
  Value::Record out = r;
  for (auto& slot : out.fields)
    if (slot.first == f) {
      slot.second = std::move(v);
      return Value{std::move(out)};
    }
  stuck(e, "record lacks field '" + f + "'");
}

const Value& lookup(const Env& env, const std::string& x, const Expr& e) {
  const Value* v = env.lookup(x);
  if (!v) stuck(e, "unbound variable '" + x + "'");
  return *v;
}

const AbstractFnSpec& resolve_abstract(const Program& program, const Registry& registry, const Value::AbsFun& f,
                                       std::vector<TypeRef>& targs) {
  AbsInstance target = abstract_target(program, f.name, f.type_args);
  const AbstractFnSpec* spec = registry.find_fn(target.name);
  if (!spec) throw Error(ErrorCode::MissingAbstractImpl, "no implementation registered for '" + target.name + "'");
  targs = std::move(target.type_args);
  return *spec;
}

}  // namespace

Value apply_primop(PrimOp op, const std::vector<Value>& args) {
  auto get = [&](std::size_t i) -> const Value::Lit& {
    const auto* l = args.at(i).as<Value::Lit>();
    if (!l) throw Error(ErrorCode::StuckError, "primitive operand is not a literal");
    return *l;
  };
  const Value::Lit& a = get(0);
  const PrimType t = a.type;
  const std::uint64_t m = mask(t);
  if (op == PrimOp::Not) return v_bool(a.value == 0);
  if (op == PrimOp::Complement) return v_lit(~a.value & m, t);
  const std::uint64_t x = a.value;
  const std::uint64_t y = get(1).value;
  const unsigned bits = prim_bits(t);
  switch (op) {
    case PrimOp::Add: return v_lit((x + y) & m, t);
    case PrimOp::Sub: return v_lit((x - y) & m, t);
    case PrimOp::Mul: return v_lit((x * y) & m, t);
    case PrimOp::Div:
      if (y == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
      return v_lit(x / y, t);
    case PrimOp::Mod:
      if (y == 0) throw Error(ErrorCode::DivisionByZero, "modulo by zero");
      return v_lit(x % y, t);
    case PrimOp::BitAnd: return v_lit(x & y, t);
    case PrimOp::BitOr: return v_lit(x | y, t);
    case PrimOp::BitXor: return v_lit(x ^ y, t);
    case PrimOp::Shl: return v_lit(y >= bits ? 0 : (x << y) & m, t);
    case PrimOp::Shr: return v_lit(y >= bits ? 0 : x >> y, t);
    case PrimOp::Eq: return v_bool(x == y);
    case PrimOp::Ne: return v_bool(x != y);
    case PrimOp::Lt: return v_bool(x < y);
    case PrimOp::Le: return v_bool(x <= y);
    case PrimOp::Gt: return v_bool(x > y);
    case PrimOp::Ge: return v_bool(x >= y);
    case PrimOp::And: return v_bool(x != 0 && y != 0);
    case PrimOp::Or: return v_bool(x != 0 || y != 0);
    default: break;
  }
  throw Error(ErrorCode::StuckError, "unhandled primitive operator");
}

// ---------------------------------------------------------------------------
// Value semantics

ValueInterpreter::ValueInterpreter(const Program& program, const Registry& registry, Instantiator& inst,
                                   EvalOptions opts)
    : program_(program), registry_(registry), inst_(inst), opts_(opts) {
  callbacks_.apply_v = [this](const Value& fn, const Value& arg) { return apply(fn, arg); };
}

void ValueInterpreter::burn(const Expr& e) {
  if (opts_.fuel == 0) throw Error(ErrorCode::FuelExhausted, "evaluation step budget exhausted", e.span);
  --opts_.fuel;
}

Value ValueInterpreter::eval(const Env& env, const Expr& e) {
  burn(e);
  if (opts_.tracer) opts_.tracer->enter(e, env, nullptr);
  Value result = step(env, e);
  if (opts_.tracer) opts_.tracer->leave(result, nullptr);
  return result;
}

Value ValueInterpreter::apply(const Value& fn, const Value& arg) {
  if (const auto* f = fn.as<Value::Fun>()) return eval(Env{}.bind(f->param, arg), *f->body);
  if (const auto* f = fn.as<Value::AbsFun>()) {
    std::vector<TypeRef> targs;
    const AbstractFnSpec& spec = resolve_abstract(program_, registry_, *f, targs);
    if (opts_.tracer) opts_.tracer->enter_ffi(spec.name, targs, arg, nullptr);
    Value result = spec.impl_v(targs, arg, callbacks_);
    if (opts_.tracer) opts_.tracer->leave_ffi(result, nullptr);
    return result;
  }
  throw Error(ErrorCode::StuckError, "applying a non-function " + value_to_string(fn));
}

Value ValueInterpreter::apply_fn(const std::string& name, const std::vector<TypeRef>& type_args, const Value& arg) {
  return apply(inst_.function_value(name, type_args), arg);
}

Value ValueInterpreter::step(const Env& env, const Expr& e) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::Var>) {
          return lookup(env, x.name, e);
        } else if constexpr (std::is_same_v<T, ex::Unit>) {
          return v_unit();
        } else if constexpr (std::is_same_v<T, ex::Lit>) {
          return v_lit(x.value, x.type);
        } else if constexpr (std::is_same_v<T, ex::FunRef>) {
          return inst_.function_value(x.name, x.type_args);
        } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          std::vector<Value> args;
          for (const auto& a : x.args) args.push_back(eval(env, *a));
          try {
            return apply_primop(x.op, args);
          } catch (const Error& err) {
            throw Error(err.code(), err.what(), e.span);
          }
        } else if constexpr (std::is_same_v<T, ex::App>) {
          Value fn = eval(env, *x.fn);
          Value arg = eval(env, *x.arg);
          return apply(fn, arg);
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          Value v = eval(env, *x.bound);
          return eval(env.bind(x.name, std::move(v)), *x.body);
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          Value v = eval(env, *x.bound);
          return eval(env.bind(x.name, std::move(v)), *x.body);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          // No stated rule for if; evaluate the condition, then one branch.
          const bool c = lit(eval(env, *x.cond), e).value != 0;
          return eval(env, c ? *x.then_branch : *x.else_branch);
        } else if constexpr (std::is_same_v<T, ex::Cast>) {
          return v_lit(lit(eval(env, *x.operand), e).value, x.target);
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          return eval(env, *x.operand);
        } else if constexpr (std::is_same_v<T, ex::Con>) {
          return v_con(x.ctor, eval(env, *x.operand));
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          Value s = eval(env, *x.scrutinee);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "case on a non-variant " + value_to_string(s));
          if (c->ctor == x.ctor) return eval(env.bind(x.match_var, *c->payload), *x.match_body);
          return eval(env.bind(x.else_var, std::move(s)), *x.else_body);
        } else if constexpr (std::is_same_v<T, ex::Esac>) {
          Value s = eval(env, *x.operand);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "esac on a non-variant " + value_to_string(s));
          return *c->payload;
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          std::vector<std::pair<std::string, Value>> fields;
          for (const auto& [name, fe] : x.fields) fields.emplace_back(name, eval(env, *fe));
          return v_record(std::move(fields));
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          Value r = eval(env, *x.record);
          return field_of(record_of(r, e), x.field, e);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          Value r = eval(env, *x.record);
          Value v = eval(env, *x.value);
          return with_field(record_of(r, e), x.field, std::move(v), e);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          Value r = eval(env, *x.record);
          Value f = field_of(record_of(r, e), x.field, e);
          return eval(env.bind(x.record_var, std::move(r)).bind(x.field_var, std::move(f)), *x.body);
        } else {
          Value s = eval(env, *x.scrutinee);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "match on a non-variant " + value_to_string(s));
          for (const auto& arm : x.arms)
            if (arm.ctor == c->ctor) return eval(env.bind(arm.var, *c->payload), *arm.body);
          stuck(e, "no arm for " + c->ctor);
        }
      },
      e.node);
}

// ---------------------------------------------------------------------------
// Update semantics

UpdateInterpreter::UpdateInterpreter(const Program& program, const Registry& registry, Instantiator& inst,
                                     EvalOptions opts)
    : program_(program), registry_(registry), inst_(inst), opts_(opts) {
  callbacks_.apply_u = [this](const Value& fn, const Value& arg, Store& store) { return apply(fn, arg, store); };
}

void UpdateInterpreter::burn(const Expr& e) {
  if (opts_.fuel == 0) throw Error(ErrorCode::FuelExhausted, "evaluation step budget exhausted", e.span);
  --opts_.fuel;
}

Value UpdateInterpreter::eval(const Env& env, Store& store, const Expr& e) {
  burn(e);
  if (opts_.tracer) opts_.tracer->enter(e, env, &store);
  Value result = step(env, store, e);
  if (opts_.tracer) opts_.tracer->leave(result, &store);
  return result;
}

Value UpdateInterpreter::apply(const Value& fn, const Value& arg, Store& store) {
  if (const auto* f = fn.as<Value::Fun>()) return eval(Env{}.bind(f->param, arg), store, *f->body);
  if (const auto* f = fn.as<Value::AbsFun>()) {
    std::vector<TypeRef> targs;
    const AbstractFnSpec& spec = resolve_abstract(program_, registry_, *f, targs);
    if (opts_.tracer) opts_.tracer->enter_ffi(spec.name, targs, arg, &store);
    Value result = spec.impl_u(targs, arg, store, callbacks_);
    if (opts_.tracer) opts_.tracer->leave_ffi(result, &store);
    return result;
  }
  throw Error(ErrorCode::StuckError, "applying a non-function " + value_to_string(fn));
}

Value UpdateInterpreter::apply_fn(const std::string& name, const std::vector<TypeRef>& type_args, const Value& arg,
                                  Store& store) {
  return apply(inst_.function_value(name, type_args), arg, store);
}

Value UpdateInterpreter::step(const Env& env, Store& store, const Expr& e) {
  auto deref = [&](const Value& v) -> const Value::Record& {
    if (const auto* p = v.as<Value::Ptr>()) {
      const Value* cell = store.find(p->id);
      if (!cell) throw Error(ErrorCode::DanglingPointer, "dangling pointer " + std::to_string(p->id), e.span);
      return record_of(*cell, e);
    }
    return record_of(v, e);
  };
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::Var>) {
          return lookup(env, x.name, e);
        } else if constexpr (std::is_same_v<T, ex::Unit>) {
          return v_unit();
        } else if constexpr (std::is_same_v<T, ex::Lit>) {
          return v_lit(x.value, x.type);
        } else if constexpr (std::is_same_v<T, ex::FunRef>) {
          return inst_.function_value(x.name, x.type_args);
        } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          std::vector<Value> args;
          for (const auto& a : x.args) args.push_back(eval(env, store, *a));
          try {
            return apply_primop(x.op, args);
          } catch (const Error& err) {
            throw Error(err.code(), err.what(), e.span);
          }
        } else if constexpr (std::is_same_v<T, ex::App>) {
          Value fn = eval(env, store, *x.fn);
          Value arg = eval(env, store, *x.arg);
          return apply(fn, arg, store);
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          Value v = eval(env, store, *x.bound);
          return eval(env.bind(x.name, std::move(v)), store, *x.body);
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          Value v = eval(env, store, *x.bound);
          return eval(env.bind(x.name, std::move(v)), store, *x.body);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          // No stated rule for if; evaluate the condition, then one branch.
          const bool c = lit(eval(env, store, *x.cond), e).value != 0;
          return eval(env, store, c ? *x.then_branch : *x.else_branch);
        } else if constexpr (std::is_same_v<T, ex::Cast>) {
          return v_lit(lit(eval(env, store, *x.operand), e).value, x.target);
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          return eval(env, store, *x.operand);
        } else if constexpr (std::is_same_v<T, ex::Con>) {
          return v_con(x.ctor, eval(env, store, *x.operand));
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          Value s = eval(env, store, *x.scrutinee);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "case on a non-variant " + value_to_string(s));
          if (c->ctor == x.ctor) return eval(env.bind(x.match_var, *c->payload), store, *x.match_body);
          return eval(env.bind(x.else_var, std::move(s)), store, *x.else_body);
        } else if constexpr (std::is_same_v<T, ex::Esac>) {
          Value s = eval(env, store, *x.operand);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "esac on a non-variant " + value_to_string(s));
          return *c->payload;
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          std::vector<std::pair<std::string, Value>> fields;
          for (const auto& [name, fe] : x.fields) fields.emplace_back(name, eval(env, store, *fe));
          return v_record(std::move(fields));
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          Value r = eval(env, store, *x.record);
          return field_of(deref(r), x.field, e);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          Value r = eval(env, store, *x.record);
          Value v = eval(env, store, *x.value);
          if (const auto* p = r.as<Value::Ptr>()) {
            Value& cell = store.at(p->id);
            cell = with_field(record_of(cell, e), x.field, std::move(v), e);
            return r;
          }
          return with_field(record_of(r, e), x.field, std::move(v), e);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          Value r = eval(env, store, *x.record);
          Value f = field_of(deref(r), x.field, e);
          return eval(env.bind(x.record_var, std::move(r)).bind(x.field_var, std::move(f)), store, *x.body);
        } else {
          Value s = eval(env, store, *x.scrutinee);
          const auto* c = s.as<Value::Con>();
          if (!c) stuck(e, "match on a non-variant " + value_to_string(s));
          for (const auto& arm : x.arms)
            if (arm.ctor == c->ctor) return eval(env.bind(arm.var, *c->payload), store, *arm.body);
          stuck(e, "no arm for " + c->ctor);
        }
      },
      e.node);
}

Value eval_v(const Program& program, const Registry& registry, const Env& env, const Expr& e, EvalOptions opts) {
  Instantiator inst(program);
  return ValueInterpreter(program, registry, inst, opts).eval(env, e);
}

Value apply_fn_v(const Program& program, const Registry& registry, const std::string& name,
                 const std::vector<TypeRef>& type_args, const Value& arg, EvalOptions opts) {
  Instantiator inst(program);
  return ValueInterpreter(program, registry, inst, opts).apply_fn(name, type_args, arg);
}

std::pair<Value, Store> eval_u(const Program& program, const Registry& registry, const Env& env, Store store,
                               const Expr& e, EvalOptions opts) {
  Instantiator inst(program);
  Value v = UpdateInterpreter(program, registry, inst, opts).eval(env, store, e);
  return {std::move(v), std::move(store)};
}

std::pair<Value, Store> apply_fn_u(const Program& program, const Registry& registry, const std::string& name,
                                   const std::vector<TypeRef>& type_args, const Value& arg, Store store,
                                   EvalOptions opts) {
  Instantiator inst(program);
  Value v = UpdateInterpreter(program, registry, inst, opts).apply_fn(name, type_args, arg, store);
  return {std::move(v), std::move(store)};
}

}  // namespace cogent
