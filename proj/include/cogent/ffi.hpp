#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cogent/ast.hpp"
#include "cogent/corr.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// Relates one component (either side may be absent for single-sided typing).
using ElemRelate =
    std::function<CorrReport(const Value* u, const Value* v, const TypeRef& t, const std::string& path)>;

struct AbsRelateArgs {
  const Value* u;
  const Store* store;
  const Value* v;
  const std::vector<TypeRef>& type_args;
  Mode mode;
  const ElemRelate& elem;
  const std::string& path;
};

using AbsRelate = std::function<CorrReport(const AbsRelateArgs&)>;
using ValueGen = std::function<Value(const TypeRef&)>;

struct AbstractTypeSpec {
  std::string name;
  std::size_t arity = 0;
  AbsRelate relate;
  std::function<Value(const std::vector<TypeRef>&)> zero;
  /// Random value-semantics inhabitant; `gen` draws component values.
  std::function<Value(const std::vector<TypeRef>&, std::mt19937_64&, const ValueGen&)> generate;
};

/// Lets FFI functions call back into the program (higher-order iterators).
struct FfiCallbacks {
  std::function<Value(const Value& fn, const Value& arg)> apply_v;
  std::function<Value(const Value& fn, const Value& arg, Store& store)> apply_u;
};

using ImplV = std::function<Value(const std::vector<TypeRef>&, const Value&, const FfiCallbacks&)>;
using ImplU = std::function<Value(const std::vector<TypeRef>&, const Value&, Store&, const FfiCallbacks&)>;

struct AbstractFnSpec {
  std::string name;
  PolyType signature;
  ImplV impl_v;
  ImplU impl_u;
};

class Registry {
 public:
  /// Throws DuplicateRegistration.
  void register_type(AbstractTypeSpec spec);
  void register_fn(AbstractFnSpec spec);
  /// Overwrites an existing registration; for test doubles.
  void replace_fn(AbstractFnSpec spec);

  const AbstractTypeSpec* find_type(std::string_view name) const;
  const AbstractFnSpec* find_fn(std::string_view name) const;
  /// Throw UnknownAbstract.
  const AbstractTypeSpec& lookup_type(std::string_view name) const;
  const AbstractFnSpec& lookup_fn(std::string_view name) const;

  const std::map<std::string, AbstractFnSpec, std::less<>>& functions() const { return fns_; }

 private:
  std::map<std::string, AbstractTypeSpec, std::less<>> types_;
  std::map<std::string, AbstractFnSpec, std::less<>> fns_;
};

/// Source declarations of the built-in WordArray functions, ready to paste
/// into a program.
const std::string& builtin_declarations();

/// WordArray type and functions, plus an allocator or deallocator for every
/// `alloc_*` / `free_*` declaration of the program. Throws SignatureMismatch
/// when such a declaration has the wrong shape.
Registry builtin_library(const Program& program);

/// Name and type arguments the registry knows an abstract function by,
/// following `instance_of` for monomorphised copies.
AbsInstance abstract_target(const Program& program, const std::string& name, const std::vector<TypeRef>& type_args);

/// Every registered abstract declaration must agree with the registry's
/// signature up to binder names. Throws SignatureMismatch.
void check_abstract_signatures(const Registry& registry, const Program& program);

/// Zero of a primitive, unit, or structured type built from those.
Value zero_value(const TypeRef& t);

}  // namespace cogent
