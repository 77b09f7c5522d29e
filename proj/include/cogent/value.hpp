#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cogent/ast.hpp"

namespace cogent {

/// Runtime values of both semantics. `Ptr` only appears under the update
/// semantics; value-semantics records hold their fields inline.
struct Value {
  struct Lit {
    std::uint64_t value = 0;
    PrimType type = PrimType::U32;
  };
  struct Unit {};
  /// A concrete function instance: the body with type arguments substituted.
  struct Fun {
    std::string name;
    std::vector<TypeRef> type_args;
    std::string param;
    ExprRef body;
  };
  struct AbsFun {
    std::string name;
    std::vector<TypeRef> type_args;
  };
  struct Con {
    std::string ctor;
    std::shared_ptr<const Value> payload;
  };
  /// Every slot is present, including those taken at the type level.
  struct Record {
    std::vector<std::pair<std::string, Value>> fields;
  };
  /// Opaque payload of an abstract type, interpreted by its FFI registration.
  struct Abstract {
    std::string tag;
    std::vector<Value> items;
  };
  struct Ptr {
    std::uint64_t id = 0;
  };

  std::variant<Lit, Unit, Fun, AbsFun, Con, Record, Abstract, Ptr> node;

  Value() : node(Unit{}) {}
  Value(Lit x) : node(std::move(x)) {}
  Value(Unit x) : node(x) {}
  Value(Fun x) : node(std::move(x)) {}
  Value(AbsFun x) : node(std::move(x)) {}
  Value(Con x) : node(std::move(x)) {}
  Value(Record x) : node(std::move(x)) {}
  Value(Abstract x) : node(std::move(x)) {}
  Value(Ptr x) : node(x) {}

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  T* as() { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

using VValue = Value;
using UValue = Value;

Value v_lit(std::uint64_t value, PrimType type);
Value v_bool(bool b);
Value v_unit();
Value v_con(std::string ctor, Value payload);
Value v_record(std::vector<std::pair<std::string, Value>> fields);
Value v_ptr(std::uint64_t id);

/// Field slot lookup by name, or nullptr.
const Value* record_field(const Value::Record& r, std::string_view name);

/// Structural equality. Functions compare by name, type arguments and body.
bool value_equal(const Value& a, const Value& b);

class Store {
 public:
  std::uint64_t alloc(Value v);
  /// Throws DoubleFree when p is not allocated.
  void free(std::uint64_t p);
  /// Throws DanglingPointer.
  const Value& at(std::uint64_t p) const;
  Value& at(std::uint64_t p);
  const Value* find(std::uint64_t p) const;
  bool contains(std::uint64_t p) const { return cells_.count(p) > 0; }
  const std::map<std::uint64_t, Value>& cells() const { return cells_; }
  std::uint64_t next_id() const { return next_; }

  /// Installs a value at a chosen pointer; used to build fixtures by hand.
  void set(std::uint64_t p, Value v);

 private:
  std::map<std::uint64_t, Value> cells_;
  std::uint64_t next_ = 1;
};

bool store_equal(const Store& a, const Store& b);

/// Persistent environment; lookups find the innermost binding.
class Env {
 public:
  Env() = default;
  Env bind(std::string name, Value value) const;
  const Value* lookup(std::string_view name) const;
  /// Innermost first.
  std::vector<std::pair<std::string, Value>> bindings() const;

 private:
  struct Node {
    std::string name;
    Value value;
    std::shared_ptr<const Node> next;
  };
  explicit Env(std::shared_ptr<const Node> head) : head_(std::move(head)) {}
  std::shared_ptr<const Node> head_;
};

using VEnv = Env;
using UEnv = Env;

// JSON forms: {"lit":5,"ty":"u8"}, {"unit":null}, {"con":["Some",v]},
// {"rec":{"f":v}}, {"fun":"f","targs":["u8"]}, {"absfun":"f","targs":[]},
// {"abs":"WordArray","items":[...]}, {"ptr":3}.
nlohmann::json value_to_json(const Value& v);
nlohmann::json store_to_json(const Store& s);

/// Rebuilds a function value from its name and type arguments.
using FunResolver = std::function<Value(const std::string& name, const std::vector<TypeRef>& type_args)>;

/// Reads a value of type t. Record fields follow the order in t; taken fields
/// may be omitted and then hold unit. Throws InvalidValue.
Value value_from_json(const nlohmann::json& j, const TypeRef& t, const FunResolver& resolve);

/// Reads a value with no type guidance; functions are rejected.
Value value_from_json_untyped(const nlohmann::json& j);

std::string value_to_string(const Value& v);

}  // namespace cogent
