#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

namespace cogent {

using PtrSet = std::set<std::uint64_t>;

/// Read-only and writable pointer sets of a correspondence judgement.
struct PtrSets {
  PtrSet ro;
  PtrSet rw;
};

struct CorrFailure {
  /// ShapeMismatch, DanglingPointer, AliasViolation, ReadOnlyContainsWritable,
  /// ValueMismatch or MissingBinding.
  std::string kind;
  std::string rule;
  std::string path;
  std::string reason;
};

struct CorrReport {
  bool ok = true;
  PtrSets sets;
  std::optional<CorrFailure> failure;
};

CorrReport corr_ok(PtrSets sets = {});
CorrReport corr_fail(std::string kind, std::string rule, std::string path, std::string reason);

bool disjoint(const PtrSet& a, const PtrSet& b);
bool subset(const PtrSet& a, const PtrSet& b);
PtrSet set_union(const PtrSet& a, const PtrSet& b);

/// Adds one more component to a list judgement: the writable set of each side
/// must not meet anything on the other side. Returns false and fills `acc`
/// with an AliasViolation on overlap.
bool corr_join(CorrReport& acc, const CorrReport& next, const std::string& rule, const std::string& path);

nlohmann::json ptr_set_json(const PtrSet& s);
nlohmann::json corr_failure_json(const CorrFailure& f);

}  // namespace cogent
