#include "cogent/value.hpp"

#include "cogent/syntax.hpp"

namespace cogent {

Value v_lit(std::uint64_t value, PrimType type) { return Value{Value::Lit{value, type}}; }
Value v_bool(bool b) { return v_lit(b ? 1 : 0, PrimType::Bool); }
Value v_unit() { return Value{Value::Unit{}}; }
Value v_con(std::string ctor, Value payload) {
  return Value{Value::Con{std::move(ctor), std::make_shared<const Value>(std::move(payload))}};
}
Value v_record(std::vector<std::pair<std::string, Value>> fields) {
  return Value{Value::Record{std::move(fields)}};
}
Value v_ptr(std::uint64_t id) { return Value{Value::Ptr{id}}; }

const Value* record_field(const Value::Record& r, std::string_view name) {
  for (const auto& f : r.fields)
    if (f.first == name) return &f.second;
  return nullptr;
}

namespace {

bool types_equal(const std::vector<TypeRef>& a, const std::vector<TypeRef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_equal(a[i], b[i])) return false;
  return true;
}

nlohmann::json types_to_json(const std::vector<TypeRef>& ts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : ts) out.push_back(type_to_string(t));
  return out;
}

std::vector<TypeRef> types_from_json(const nlohmann::json& j) {
  std::vector<TypeRef> out;
  if (!j.is_array()) throw Error(ErrorCode::InvalidValue, "expected an array of types");
  for (const auto& t : j) out.push_back(parse_type(t.get<std::string>()));
  return out;
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidValue, msg); }

std::uint64_t read_lit(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>() ? 1 : 0;
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  invalid("literal must be a non-negative integer or boolean, found " + j.dump());
}

const nlohmann::json& single_key(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) invalid(std::string("expected an object with key '") + key + "', found " + j.dump());
  return j.at(key);
}

}  // namespace

bool value_equal(const Value& a, const Value& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Value::Lit>) {
          return x.value == y.value && x.type == y.type;
        } else if constexpr (std::is_same_v<T, Value::Unit>) {
          return true;
        } else if constexpr (std::is_same_v<T, Value::Fun>) {
          return x.name == y.name && types_equal(x.type_args, y.type_args) && x.param == y.param &&
                 (x.body == y.body || expr_equal(*x.body, *y.body));
        } else if constexpr (std::is_same_v<T, Value::AbsFun>) {
          return x.name == y.name && types_equal(x.type_args, y.type_args);
        } else if constexpr (std::is_same_v<T, Value::Con>) {
          return x.ctor == y.ctor && value_equal(*x.payload, *y.payload);
        } else if constexpr (std::is_same_v<T, Value::Record>) {
          if (x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i)
            if (x.fields[i].first != y.fields[i].first || !value_equal(x.fields[i].second, y.fields[i].second))
              return false;
          return true;
        } else if constexpr (std::is_same_v<T, Value::Abstract>) {
          if (x.tag != y.tag || x.items.size() != y.items.size()) return false;
          for (std::size_t i = 0; i < x.items.size(); ++i)
            if (!value_equal(x.items[i], y.items[i])) return false;
          return true;
        } else {
          return x.id == y.id;
        }
      },
      a.node);
}

std::uint64_t Store::alloc(Value v) {
  const std::uint64_t p = next_++;
  cells_.emplace(p, std::move(v));
  return p;
}

void Store::free(std::uint64_t p) {
  if (cells_.erase(p) == 0) throw Error(ErrorCode::DoubleFree, "free of unallocated pointer " + std::to_string(p));
}

const Value& Store::at(std::uint64_t p) const {
  auto it = cells_.find(p);
  if (it == cells_.end()) throw Error(ErrorCode::DanglingPointer, "dangling pointer " + std::to_string(p));
  return it->second;
}

Value& Store::at(std::uint64_t p) {
  auto it = cells_.find(p);
  if (it == cells_.end()) throw Error(ErrorCode::DanglingPointer, "dangling pointer " + std::to_string(p));
  return it->second;
}

const Value* Store::find(std::uint64_t p) const {
  auto it = cells_.find(p);
  return it == cells_.end() ? nullptr : &it->second;
}

void Store::set(std::uint64_t p, Value v) {
  cells_[p] = std::move(v);
  if (p >= next_) next_ = p + 1;
}

bool store_equal(const Store& a, const Store& b) {
  if (a.cells().size() != b.cells().size()) return false;
  for (const auto& [p, v] : a.cells()) {
    const Value* w = b.find(p);
    if (!w || !value_equal(v, *w)) return false;
  }
  return true;
}

Env Env::bind(std::string name, Value value) const {
  return Env(std::make_shared<const Node>(Node{std::move(name), std::move(value), head_}));
}

const Value* Env::lookup(std::string_view name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

std::vector<std::pair<std::string, Value>> Env::bindings() const {
  std::vector<std::pair<std::string, Value>> out;
  for (const Node* n = head_.get(); n; n = n->next.get()) out.emplace_back(n->name, n->value);
  return out;
}

nlohmann::json value_to_json(const Value& v) {
  return std::visit(
      [&](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Value::Lit>) {
          return {{"lit", x.value}, {"ty", std::string(prim_name(x.type))}};
        } else if constexpr (std::is_same_v<T, Value::Unit>) {
          return {{"unit", nullptr}};
        } else if constexpr (std::is_same_v<T, Value::Fun>) {
          return {{"fun", x.name}, {"targs", types_to_json(x.type_args)}};
        } else if constexpr (std::is_same_v<T, Value::AbsFun>) {
          return {{"absfun", x.name}, {"targs", types_to_json(x.type_args)}};
        } else if constexpr (std::is_same_v<T, Value::Con>) {
          return {{"con", nlohmann::json::array({x.ctor, value_to_json(*x.payload)})}};
        } else if constexpr (std::is_same_v<T, Value::Record>) {
          nlohmann::json fields = nlohmann::json::object();
          for (const auto& [name, fv] : x.fields) fields[name] = value_to_json(fv);
          return {{"rec", std::move(fields)}};
        } else if constexpr (std::is_same_v<T, Value::Abstract>) {
          nlohmann::json items = nlohmann::json::array();
          for (const auto& i : x.items) items.push_back(value_to_json(i));
          return {{"abs", x.tag}, {"items", std::move(items)}};
        } else {
          return {{"ptr", x.id}};
        }
      },
      v.node);
}

nlohmann::json store_to_json(const Store& s) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [p, v] : s.cells()) out[std::to_string(p)] = value_to_json(v);
  return out;
}

Value value_from_json(const nlohmann::json& j, const TypeRef& t, const FunResolver& resolve) {
  if (j.is_object() && j.contains("ptr")) invalid("pointers are not accepted in input values");
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TPrim>) {
          const std::uint64_t n = read_lit(j.is_object() ? single_key(j, "lit") : j);
          if (j.is_object() && j.contains("ty") && j.at("ty").get<std::string>() != prim_name(x.prim))
            invalid("literal type " + j.at("ty").get<std::string>() + " does not match " + type_to_string(t));
          if (n > prim_max_literal(x.prim)) invalid(std::to_string(n) + " out of range for " + type_to_string(t));
          return v_lit(n, x.prim);
        } else if constexpr (std::is_same_v<T, TUnit>) {
          if (!(j.is_null() || (j.is_object() && j.contains("unit")) || j == "unit"))
            invalid("expected unit, found " + j.dump());
          return v_unit();
        } else if constexpr (std::is_same_v<T, TVariant>) {
          const auto& c = single_key(j, "con");
          if (!c.is_array() || c.size() != 2) invalid("con expects [ctor, value]");
          const std::string ctor = c.at(0).get<std::string>();
          const Alternative* alt = find_alt(x, ctor);
          if (!alt) invalid("constructor '" + ctor + "' not in " + type_to_string(t));
          return v_con(ctor, value_from_json(c.at(1), alt->type, resolve));
        } else if constexpr (std::is_same_v<T, TRecord>) {
          const auto& r = single_key(j, "rec");
          if (!r.is_object()) invalid("rec expects an object");
          std::vector<std::pair<std::string, Value>> fields;
          for (const auto& f : x.fields) {
            if (!r.contains(f.name)) {
              if (!f.taken) invalid("missing field '" + f.name + "'");
              fields.emplace_back(f.name, v_unit());
            } else if (f.taken) {
              fields.emplace_back(f.name, v_unit());
            } else {
              fields.emplace_back(f.name, value_from_json(r.at(f.name), f.type, resolve));
            }
          }
          for (const auto& [k, _] : r.items())
            if (!find_field(x, k)) invalid("unknown field '" + k + "' for " + type_to_string(t));
          return v_record(std::move(fields));
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          const auto& tag = single_key(j, "abs");
          if (tag.get<std::string>() != x.name) invalid("abstract tag mismatch: " + tag.dump());
          Value::Abstract a{x.name, {}};
          if (j.contains("items")) {
            for (const auto& i : j.at("items")) {
              if (x.args.size() == 1) a.items.push_back(value_from_json(i, x.args[0], resolve));
              else a.items.push_back(value_from_json_untyped(i));
            }
          }
          return Value{std::move(a)};
        } else if constexpr (std::is_same_v<T, TFun>) {
          if (!j.is_object() || !(j.contains("fun") || j.contains("absfun")))
            invalid("expected a function reference, found " + j.dump());
          const std::string name = j.contains("fun") ? j.at("fun").get<std::string>() : j.at("absfun").get<std::string>();
          const auto targs = j.contains("targs") ? types_from_json(j.at("targs")) : std::vector<TypeRef>{};
          if (!resolve) invalid("function values need a program");
          return resolve(name, targs);
        } else {
          invalid("cannot read a value of non-ground type " + type_to_string(t));
        }
      },
      t->node);
}

Value value_from_json_untyped(const nlohmann::json& j) {
  if (!j.is_object() || j.size() == 0) invalid("expected a value object, found " + j.dump());
  if (j.contains("lit")) {
    PrimType ty = PrimType::U32;
    if (j.contains("ty")) {
      const std::string s = j.at("ty").get<std::string>();
      bool found = false;
      for (PrimType p : {PrimType::U8, PrimType::U16, PrimType::U32, PrimType::U64, PrimType::Bool})
        if (prim_name(p) == s) ty = p, found = true;
      if (!found) invalid("unknown primitive type '" + s + "'");
    }
    const std::uint64_t n = read_lit(j.at("lit"));
    if (n > prim_max_literal(ty)) invalid(std::to_string(n) + " out of range");
    return v_lit(n, ty);
  }
  if (j.contains("unit")) return v_unit();
  if (j.contains("con")) {
    const auto& c = j.at("con");
    if (!c.is_array() || c.size() != 2) invalid("con expects [ctor, value]");
    return v_con(c.at(0).get<std::string>(), value_from_json_untyped(c.at(1)));
  }
  if (j.contains("rec")) {
    std::vector<std::pair<std::string, Value>> fields;
    for (const auto& [k, fv] : j.at("rec").items()) fields.emplace_back(k, value_from_json_untyped(fv));
    return v_record(std::move(fields));
  }
  if (j.contains("abs")) {
    Value::Abstract a{j.at("abs").get<std::string>(), {}};
    if (j.contains("items"))
      for (const auto& i : j.at("items")) a.items.push_back(value_from_json_untyped(i));
    return Value{std::move(a)};
  }
  if (j.contains("ptr")) return v_ptr(j.at("ptr").get<std::uint64_t>());
  if (j.contains("absfun"))
    return Value{Value::AbsFun{j.at("absfun").get<std::string>(),
                               j.contains("targs") ? types_from_json(j.at("targs")) : std::vector<TypeRef>{}}};
  invalid("cannot read value " + j.dump());
}

std::string value_to_string(const Value& v) { return value_to_json(v).dump(); }

}  // namespace cogent
