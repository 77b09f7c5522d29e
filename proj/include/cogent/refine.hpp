#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cogent/ast.hpp"
#include "cogent/corr.hpp"
#include "cogent/ffi.hpp"
#include "cogent/typecheck.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// Decides the correspondence and value-typing relations by a traversal
/// directed by the type. Either value may be omitted for one-sided typing.
/// Memoises function-body typing; not thread-safe.
class Relator {
 public:
  Relator(const Program& program, const Registry& registry) : program_(program), registry_(registry) {}

  CorrReport corr_value(const Value& u, const Store& store, const Value& v, const TypeRef& t);
  CorrReport corr_env(const Env& u, const Store& store, const Env& v, const std::vector<CtxBinding>& gamma);
  bool value_typing_v(const Value& v, const TypeRef& t, std::string* why = nullptr);
  CorrReport value_typing_u(const Value& u, const Store& store, const TypeRef& t);
  CorrReport env_typing_u(const Env& u, const Store& store, const std::vector<CtxBinding>& gamma);
  bool env_typing_v(const Env& v, const std::vector<CtxBinding>& gamma, std::string* why = nullptr);

  CorrReport relate(const Value* u, const Store* store, const Value* v, const TypeRef& t, const std::string& path);

 private:
  CorrReport relate_env(const Env* u, const Store* store, const Env* v, const std::vector<CtxBinding>& gamma);
  bool body_types(const Value::Fun& f, const TFun& t);

  const Program& program_;
  const Registry& registry_;
  std::map<std::pair<const Expr*, std::string>, bool> body_memo_;
};

CorrReport corr_value(const Program& program, const Registry& registry, const Value& u, const Store& store,
                      const Value& v, const TypeRef& t);
bool value_typing_v(const Program& program, const Registry& registry, const Value& v, const TypeRef& t);
CorrReport value_typing_u(const Program& program, const Registry& registry, const Value& u, const Store& store,
                          const TypeRef& t);

struct FrameViolation {
  /// Inertia, LeakFreedom or FreshAllocation.
  std::string kind;
  std::uint64_t ptr = 0;
};

/// Violations of the framing relation between an input and output store.
std::vector<FrameViolation> frame_check(const PtrSet& w_in, const Store& in, const PtrSet& w_out, const Store& out);

nlohmann::json frame_violations_json(const std::vector<FrameViolation>& vs);

}  // namespace cogent
