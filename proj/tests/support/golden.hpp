#pragma once

#include <string>

#include "cogent/typecheck.hpp"

#include "corpus.hpp"

namespace cogent::testgen {

/// What the golden file of a corpus program holds: the typing trees of an
/// accepted program, or the diagnostic of a rejected one.
inline std::string golden_text(const fs::path& path) {
  const std::string text = slurp(path);
  const std::string file = path.filename().string();
  try {
    const Program p = desugar_program(parse_program(text));
    const ProgramCheck pc = check_program(p);
    if (!pc.ok()) throw pc.errors.front();
    check_abstract_signatures(builtin_library(p), p);
    nlohmann::json trees = nlohmann::json::object();
    for (const auto& [name, tree] : pc.trees) trees[name] = typing_tree_to_json(tree);
    return trees.dump(2) + "\n";
  } catch (const Error& e) {
    return format_diagnostic(file, text, e) + "\n";
  }
}

inline fs::path golden_path(const fs::path& program) {
  const bool accept = program.parent_path().filename() == "accept";
  return source_dir() / "tests" / "golden" / (program.stem().string() + (accept ? ".json" : ".err"));
}

/// Set COGENT_UPDATE_GOLDEN=1 to rewrite the files instead of comparing.
inline bool update_golden() {
  const char* v = std::getenv("COGENT_UPDATE_GOLDEN");
  return v && std::string(v) == "1";
}

}  // namespace cogent::testgen
