#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogent/ast.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// A function definition specialised at ground type arguments.
struct Instance {
  std::string name;
  std::vector<TypeRef> type_args;
  const Def* def = nullptr;
  TypeRef param_type;
  TypeRef result_type;
  /// Empty for abstract functions.
  std::string param;
  ExprRef body;
};

std::string instance_key(const std::string& name, const std::vector<TypeRef>& type_args);

/// Caches specialised bodies so repeated references share one tree. Not
/// thread-safe; use one per evaluation thread.
class Instantiator {
 public:
  explicit Instantiator(const Program& program) : program_(program) {}

  /// Throws UnknownFunction or ArityError.
  const Instance& get(const std::string& name, const std::vector<TypeRef>& type_args);
  /// The runtime value a FunRef to this instance evaluates to.
  Value function_value(const std::string& name, const std::vector<TypeRef>& type_args);
  /// The instance owning a specialised body root, or nullptr.
  const Instance* by_body(const Expr* body) const;

  const Program& program() const { return program_; }
  FunResolver resolver();

 private:
  const Program& program_;
  std::map<std::string, std::unique_ptr<Instance>> cache_;
  std::unordered_map<const Expr*, const Instance*> by_body_;
};

}  // namespace cogent
