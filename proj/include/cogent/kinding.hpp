#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogent/ast.hpp"

namespace cogent {

/// Kind context: type variables with their declared kinds.
class KindContext {
 public:
  KindContext() = default;
  /// Throws DuplicateBinder.
  explicit KindContext(std::vector<std::pair<std::string, Kind>> bindings);

  const std::vector<std::pair<std::string, Kind>>& bindings() const { return bindings_; }
  const Kind* find(std::string_view name) const;
  bool empty() const { return bindings_.empty(); }

 private:
  std::vector<std::pair<std::string, Kind>> bindings_;
};

using TypeSubst = std::map<std::string, TypeRef, std::less<>>;

Kind mode_kind(Mode m);
Mode bang_mode(Mode m);
Kind bang_kind(Kind k);
TypeRef bang_type(const TypeRef& t);

/// The largest kind the type can be given. Throws UnboundTypeVariable.
Kind max_kind(const KindContext& delta, const Type& t);

/// Delta |- t : k, decided as k being a subset of the maximal kind.
bool kind_check(const KindContext& delta, const Type& t, Kind k);

/// Capture-free replacement. Observed variables become bang of their image.
/// Variables outside the substitution's domain are left untouched.
TypeRef subst_type(const TypeRef& t, const TypeSubst& subst);

/// Applies the substitution to every type annotation in e. With a non-empty
/// substitution the result is a fresh tree sharing no nodes with e.
ExprRef subst_expr(const ExprRef& e, const TypeSubst& subst);

/// Builds the substitution for a polytype instantiation. Throws ArityError.
TypeSubst make_subst(const PolyType& poly, const std::vector<TypeRef>& args, Span span = {});

/// Checks every type variable is bound in delta; throws UnboundTypeVariable.
void check_type_vars_bound(const KindContext& delta, const Type& t, Span span = {});

}  // namespace cogent
