#include "cogent/instance.hpp"

#include "cogent/kinding.hpp"

namespace cogent {

std::string instance_key(const std::string& name, const std::vector<TypeRef>& type_args) {
  std::string key = name;
  for (const auto& t : type_args) key += "|" + type_key(*t);
  return key;
}

const Instance& Instantiator::get(const std::string& name, const std::vector<TypeRef>& type_args) {
  const std::string key = instance_key(name, type_args);
  if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
  const Def* def = program_.find(name);
  if (!def) throw Error(ErrorCode::UnknownFunction, "unknown function '" + name + "'");
  const TypeSubst subst = make_subst(def->signature(), type_args, def->span);
  const TypeRef fn = subst_type(def->signature().body, subst);
  auto inst = std::make_unique<Instance>();
  inst->name = name;
  inst->type_args = type_args;
  inst->def = def;
  inst->param_type = fn->as<TFun>()->arg;
  inst->result_type = fn->as<TFun>()->result;
  if (const FunDef* f = def->fun()) {
    inst->param = f->param;
    inst->body = subst_expr(f->body, subst);
    by_body_.emplace(inst->body.get(), inst.get());
  }
  return *cache_.emplace(key, std::move(inst)).first->second;
}

Value Instantiator::function_value(const std::string& name, const std::vector<TypeRef>& type_args) {
  const Instance& inst = get(name, type_args);
  if (inst.body) return Value{Value::Fun{name, type_args, inst.param, inst.body}};
  return Value{Value::AbsFun{name, type_args}};
}

const Instance* Instantiator::by_body(const Expr* body) const {
  auto it = by_body_.find(body);
  return it == by_body_.end() ? nullptr : it->second;
}

FunResolver Instantiator::resolver() {
  return [this](const std::string& name, const std::vector<TypeRef>& targs) { return function_value(name, targs); };
}

}  // namespace cogent
