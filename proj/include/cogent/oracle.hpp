#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cogent/eval.hpp"
#include "cogent/refine.hpp"

namespace cogent {

/// Draws random value-semantics inhabitants of ground types. Function-typed
/// positions are filled with monomorphic program functions of that type.
class ValueGenerator {
 public:
  ValueGenerator(const Program& program, const Registry& registry, Instantiator& inst, std::uint64_t seed);
  /// Nullopt when some function type has no inhabitant in the program.
  std::optional<Value> generate(const TypeRef& t);

 private:
  Value gen(const TypeRef& t);

  const Program& program_;
  const Registry& registry_;
  Instantiator& inst_;
  std::mt19937_64 rng_;
  bool failed_ = false;
};

/// Places a value-semantics value into the store as its update-semantics
/// counterpart: boxed records and abstract values each get a fresh pointer.
Value lift_value(const Value& v, const TypeRef& t, Store& store, const Registry& registry);

/// How many times each obligation was checked during an oracle run.
struct OracleStats {
  std::uint64_t nodes = 0;
  std::uint64_t theorem = 0;
  std::uint64_t weakening = 0;
  std::uint64_t splitting = 0;
  std::uint64_t unrelated = 0;
  std::uint64_t bang = 0;
  std::uint64_t ffi = 0;
  std::uint64_t erasure = 0;
};

struct OracleFailure {
  /// Which obligation failed: input, output, theorem, weakening, splitting,
  /// unrelated-updates, bang, ffi-assumption, erasure, frame, evaluation or trace.
  std::string obligation;
  std::string kind;
  std::string detail;
  nlohmann::json context;
};

struct OracleVerdict {
  bool pass = false;
  PtrSets in;
  PtrSets out;
  std::vector<FrameViolation> frame;
  std::optional<OracleFailure> failure;
  OracleStats stats;
  std::optional<Value> v_result;
  std::optional<Value> u_result;
  Store store_out;
  /// Set when both semantics stopped with the same runtime error.
  std::optional<std::string> both_raised;

  /// {pass, r, w, r_out, w_out, frame_violations, failure}
  nlohmann::json to_json() const;
};

struct OracleOptions {
  std::uint64_t fuel = default_fuel();
  /// Replay the per-node theorem and lemmas, not just the end-to-end check.
  bool replay = true;
  /// Worker threads for random_oracle_runs.
  std::size_t jobs = 1;
};

OracleVerdict refinement_oracle(const Program& program, const Registry& registry, const std::string& fname,
                                const std::vector<TypeRef>& type_args, const Value& v_arg, const Value& u_arg,
                                const Store& store, OracleOptions opts = {});

/// Generates `count` inputs from `seed` and runs the oracle on each.
std::vector<OracleVerdict> random_oracle_runs(const Program& program, const Registry& registry,
                                              const std::string& fname, std::size_t count, std::uint64_t seed,
                                              OracleOptions opts = {});

}  // namespace cogent
