#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cogent/ast.hpp"
#include "cogent/value.hpp"

namespace cogent {

/// `<stem>.h` holds tags, types and prototypes; `<stem>.c` the function bodies.
struct CEmission {
  std::string header;
  std::string source;
};

/// Translates a monomorphic, A-normal, well-typed program. Throws
/// UnsupportedConstruct for anything outside that fragment.
CEmission emit_c(const Program& program, const std::string& stem);

/// `<stem>_driver.c`: reads the argument of `entry` from the JSON file named
/// by argv[1], calls it and prints the canonical result (see canonical_result).
std::string emit_driver(const Program& program, const std::string& entry, const std::string& stem);

/// Contents of `cogent_runtime.h`, which both generated files include.
const std::string& c_runtime_header();

/// Writes cogent_runtime.h, <stem>.h, <stem>.c and, when `entry` is given,
/// <stem>_driver.c into `dir`. Returns the paths written.
std::vector<std::string> write_c_files(const Program& program, const std::string& dir, const std::string& stem,
                                       const std::optional<std::string>& entry);

/// {"value":V,"heap":[C1,...],"live":N}. Pointers reachable from the value
/// are numbered 1, 2, ... in the order they are first met, value first and
/// then each heap cell in turn; taken fields are left out.
nlohmann::json canonical_result(const Value& u, const Store& store, const TypeRef& t);

/// $CC if set (nullopt when it is not executable), otherwise the first of
/// cc, gcc, clang found on PATH.
std::optional<std::string> find_c_compiler();

struct DiffCase {
  nlohmann::json input;
  nlohmann::json expected;
  nlohmann::json actual;
  bool match = false;
  /// JSON pointer of the first difference.
  std::string path;
};

struct DiffVerdict {
  /// PASS, FAIL or SKIPPED.
  std::string status;
  std::string compiler;
  std::vector<DiffCase> cases;

  nlohmann::json to_json() const;
};

/// Compiles the program (desugared, monomorphised from `fname`, normalised)
/// and compares the C driver against the update semantics on each input.
/// Inputs are value-semantics arguments for the original program. Throws
/// CompileFailure.
DiffVerdict diff_run_c(const Program& program, const std::string& fname, const std::vector<Value>& inputs);

}  // namespace cogent
