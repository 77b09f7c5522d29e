#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "cogent/ast.hpp"
#include "cogent/kinding.hpp"

namespace cogent {

struct CtxBinding {
  std::string name;
  TypeRef type;
};

/// Type context; names are distinct and the front of the list is innermost.
class TypeContext {
 public:
  TypeContext() = default;
  explicit TypeContext(std::vector<CtxBinding> bindings) : bindings_(std::move(bindings)) {}

  const std::vector<CtxBinding>& bindings() const { return bindings_; }
  const CtxBinding* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;
  std::size_t size() const { return bindings_.size(); }

  /// Restriction to the given names, preserving order.
  TypeContext restrict_to(const std::set<std::string>& names) const;
  TypeContext without(const std::set<std::string>& names) const;

 private:
  std::vector<CtxBinding> bindings_;
};

/// One application of the contraction judgement: the context was divided
/// into `left` and `right`; `shared` went to both sides.
struct SplitRecord {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<std::string> shared;
};

/// Derivation tree mirroring the rule applications of the checker.
struct TypingTree {
  std::string rule;
  const Expr* expr = nullptr;
  Span span;
  TypeRef type;
  /// Context of this judgement before weakening.
  std::vector<CtxBinding> gamma;
  /// Bindings of `gamma` discarded by weakening at this node.
  std::vector<std::string> weakened;
  std::vector<SplitRecord> splits;
  std::vector<TypingTree> children;
};

/// Divides gamma between two premises by their free variables. Variables used
/// by both must be shareable; variables used by neither are left out.
std::pair<TypeContext, TypeContext> split_context(const KindContext& delta, const TypeContext& gamma,
                                                  const std::set<std::string>& fv1,
                                                  const std::set<std::string>& fv2, Span span = {});

/// Drops every binding outside `keep`; dropped bindings must be discardable.
TypeContext weaken_context(const KindContext& delta, const TypeContext& gamma,
                           const std::set<std::string>& keep, Span span = {});

struct Checked {
  TypeRef type;
  TypingTree tree;
  /// Owner of the nodes the tree points into, when the checker built them.
  ExprRef body;
};

Checked check_expr(const Program& program, const KindContext& delta, const TypeContext& gamma,
                   const Expr& e, const std::optional<TypeRef>& expected = std::nullopt);

struct ProgramCheck {
  std::map<std::string, TypingTree> trees;
  std::vector<Error> errors;

  bool ok() const { return errors.empty(); }
};

/// Checks every function body against its signature and rejects recursion.
ProgramCheck check_program(const Program& program);

/// Throws the first error of check_program, if any.
void require_well_typed(const Program& program);

/// Checks one function instantiated at ground type arguments, under an empty
/// kind context. The instantiated body is returned in `body`.
Checked check_instance(const Program& program, const FunDef& def, const std::vector<TypeRef>& type_args);

nlohmann::json typing_tree_to_json(const TypingTree& tree);

using TreeIndex = std::unordered_map<const Expr*, const TypingTree*>;
void index_tree(const TypingTree& tree, TreeIndex& out);

}  // namespace cogent
