#pragma once

#include <random>
#include <string>
#include <vector>

#include "cogent/ast.hpp"
#include "cogent/kinding.hpp"

namespace cogent::testgen {

inline Mode random_mode(std::mt19937_64& rng) {
  return static_cast<Mode>(std::uniform_int_distribution<int>(0, 2)(rng));
}

inline PrimType random_prim(std::mt19937_64& rng) {
  return static_cast<PrimType>(std::uniform_int_distribution<int>(0, 4)(rng));
}

inline Kind random_kind(std::mt19937_64& rng) {
  return Kind(static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 7)(rng)));
}

/// Types of depth at most `depth` over the variables `vars` (none if empty).
class TypeGen {
 public:
  TypeGen(std::uint64_t seed, std::vector<std::string> vars) : rng_(seed), vars_(std::move(vars)) {}

  /// Below the last level three draws in four are compound.
  TypeRef type(int depth) {
    const int leaves = vars_.empty() ? 2 : 4;
    const int choice = pick(depth <= 1 ? leaves : 4 * leaves);
    if (choice < leaves) {
      switch (choice) {
        case 0: return t_prim(random_prim(rng_));
        case 1: return t_unit();
        case 2: return t_var(vars_[pick(static_cast<int>(vars_.size()))]);
        default: return t_observed(vars_[pick(static_cast<int>(vars_.size()))]);
      }
    }
    switch (pick(4)) {
      case 0: return t_fun(type(depth - 1), type(depth - 1));
      case 1: {
        std::vector<Alternative> alts;
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) alts.push_back({"C" + std::to_string(i), type(depth - 1)});
        return t_variant(std::move(alts));
      }
      case 2: {
        std::vector<FieldType> fields;
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) fields.push_back({"f" + std::to_string(i), type(depth - 1), pick(4) == 0});
        return t_record(std::move(fields), random_mode(rng_));
      }
      default: {
        std::vector<TypeRef> args;
        const int n = pick(3);
        for (int i = 0; i < n; ++i) args.push_back(type(depth - 1));
        return t_abstract("Buf", std::move(args), random_mode(rng_));
      }
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace cogent::testgen
