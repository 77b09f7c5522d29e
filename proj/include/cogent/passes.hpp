#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cogent/ast.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// Rewrites every multi-way match into nested cases ending in let+esac.
/// Throws DuplicateArm or EmptyMatch.
ExprRef desugar_match(const ExprRef& e, std::set<std::string>& used);
Program desugar_program(const Program& program);

/// Let-binds every compound operand left to right under fresh names `t<n>`.
/// Input must be free of match.
Program a_normalise(const Program& program);
bool is_anf(const Expr& e);

struct RenameEntry {
  std::string from;
  std::vector<TypeRef> args;
  std::string to;
};

class RenameMap {
 public:
  /// Throws Error(InvalidValue) if either direction would stop being injective.
  void add(RenameEntry entry);
  /// Throws MissingRenameEntry.
  const std::string& lookup(const std::string& name, const std::vector<TypeRef>& args) const;
  const std::string* find(const std::string& name, const std::vector<TypeRef>& args) const;
  const std::vector<RenameEntry>& entries() const { return entries_; }

  /// [{"from":"id","args":["u8"],"to":"id_0"}]
  nlohmann::json to_json() const;

 private:
  std::vector<RenameEntry> entries_;
  std::map<std::string, std::size_t> by_key_;
  std::set<std::string> targets_;
};

struct MonoResult {
  Program program;
  RenameMap renames;
};

/// Specialises every instance reachable from `entries` (default: every
/// monomorphic definition). Throws NoEntryPoint or UnresolvedInstantiation.
MonoResult monomorphise(const Program& program, const std::vector<std::string>& entries = {});

/// Replaces every function reference by its monomorphic name.
ExprRef mono_expr(const RenameMap& renames, const ExprRef& e);
Value mono_val(const RenameMap& renames, const Value& v);

}  // namespace cogent
