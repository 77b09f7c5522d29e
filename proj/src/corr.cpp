#include "cogent/corr.hpp"

#include <algorithm>

namespace cogent {

CorrReport corr_ok(PtrSets sets) { return CorrReport{true, std::move(sets), std::nullopt}; }

CorrReport corr_fail(std::string kind, std::string rule, std::string path, std::string reason) {
  return CorrReport{false, {}, CorrFailure{std::move(kind), std::move(rule), std::move(path), std::move(reason)}};
}

bool disjoint(const PtrSet& a, const PtrSet& b) {
  const PtrSet& small = a.size() <= b.size() ? a : b;
  const PtrSet& large = a.size() <= b.size() ? b : a;
  return std::none_of(small.begin(), small.end(), [&](std::uint64_t p) { return large.count(p) > 0; });
}

bool subset(const PtrSet& a, const PtrSet& b) {
  return std::all_of(a.begin(), a.end(), [&](std::uint64_t p) { return b.count(p) > 0; });
}

PtrSet set_union(const PtrSet& a, const PtrSet& b) {
  PtrSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

namespace {

std::string first_common(const PtrSet& a, const PtrSet& b) {
  for (auto p : a)
    if (b.count(p)) return std::to_string(p);
  return "?";
}

}  // namespace

bool corr_join(CorrReport& acc, const CorrReport& next, const std::string& rule, const std::string& path) {
  if (!acc.ok) return false;
  if (!next.ok) {
    acc = next;
    return false;
  }
  const PtrSet next_all = set_union(next.sets.ro, next.sets.rw);
  const PtrSet acc_all = set_union(acc.sets.ro, acc.sets.rw);
  if (!disjoint(acc.sets.rw, next_all)) {
    acc = corr_fail("AliasViolation", rule, path,
                    "writable pointer " + first_common(acc.sets.rw, next_all) + " is reachable twice");
    return false;
  }
  if (!disjoint(next.sets.rw, acc_all)) {
    acc = corr_fail("AliasViolation", rule, path,
                    "writable pointer " + first_common(next.sets.rw, acc_all) + " is reachable twice");
    return false;
  }
  acc.sets.ro.insert(next.sets.ro.begin(), next.sets.ro.end());
  acc.sets.rw.insert(next.sets.rw.begin(), next.sets.rw.end());
  return true;
}

nlohmann::json ptr_set_json(const PtrSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (auto p : s) out.push_back(p);
  return out;
}

nlohmann::json corr_failure_json(const CorrFailure& f) {
  return {{"kind", f.kind}, {"rule", f.rule}, {"path", f.path}, {"reason", f.reason}};
}

}  // namespace cogent
