#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cogent/ast.hpp"
#include "cogent/ffi.hpp"
#include "cogent/instance.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// 10^7 unless COGC_FUEL is set to a positive integer.
std::uint64_t default_fuel();

/// Observes evaluation. `store` is null under the value semantics.
class Tracer {
 public:
  virtual ~Tracer() = default;
  virtual void enter(const Expr&, const Env&, const Store*) {}
  virtual void leave(const Value&, const Store*) {}
  virtual void enter_ffi(const std::string&, const std::vector<TypeRef>&, const Value&, const Store*) {}
  virtual void leave_ffi(const Value&, const Store*) {}
};

struct EvalOptions {
  std::uint64_t fuel = default_fuel();
  Tracer* tracer = nullptr;
};

/// Applies a primitive operator to evaluated operands with wrap-around
/// arithmetic. Throws DivisionByZero.
Value apply_primop(PrimOp op, const std::vector<Value>& args);

class ValueInterpreter {
 public:
  ValueInterpreter(const Program& program, const Registry& registry, Instantiator& inst, EvalOptions opts = {});

  Value eval(const Env& env, const Expr& e);
  Value apply(const Value& fn, const Value& arg);
  Value apply_fn(const std::string& name, const std::vector<TypeRef>& type_args, const Value& arg);

 private:
  Value step(const Env& env, const Expr& e);
  void burn(const Expr& e);

  const Program& program_;
  const Registry& registry_;
  Instantiator& inst_;
  EvalOptions opts_;
  FfiCallbacks callbacks_;
};

class UpdateInterpreter {
 public:
  UpdateInterpreter(const Program& program, const Registry& registry, Instantiator& inst, EvalOptions opts = {});

  Value eval(const Env& env, Store& store, const Expr& e);
  Value apply(const Value& fn, const Value& arg, Store& store);
  Value apply_fn(const std::string& name, const std::vector<TypeRef>& type_args, const Value& arg, Store& store);

 private:
  Value step(const Env& env, Store& store, const Expr& e);
  void burn(const Expr& e);

  const Program& program_;
  const Registry& registry_;
  Instantiator& inst_;
  EvalOptions opts_;
  FfiCallbacks callbacks_;
};

Value eval_v(const Program& program, const Registry& registry, const Env& env, const Expr& e, EvalOptions opts = {});
Value apply_fn_v(const Program& program, const Registry& registry, const std::string& name,
                 const std::vector<TypeRef>& type_args, const Value& arg, EvalOptions opts = {});

std::pair<Value, Store> eval_u(const Program& program, const Registry& registry, const Env& env, Store store,
                               const Expr& e, EvalOptions opts = {});
std::pair<Value, Store> apply_fn_u(const Program& program, const Registry& registry, const std::string& name,
                                   const std::vector<TypeRef>& type_args, const Value& arg, Store store,
                                   EvalOptions opts = {});

}  // namespace cogent
