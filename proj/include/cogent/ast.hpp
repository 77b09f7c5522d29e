#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cogent/error.hpp"

namespace cogent {

// ---------------------------------------------------------------------------
// Types

enum class PrimType : std::uint8_t { U8, U16, U32, U64, Bool };

enum class Mode : std::uint8_t { ReadOnly, Writable, Unboxed };

std::string_view prim_name(PrimType t);
std::string_view mode_name(Mode m);

/// Bit width of an unsigned type; 1 for Bool.
unsigned prim_bits(PrimType t);
/// Largest representable literal, i.e. |t| - 1.
std::uint64_t prim_max_literal(PrimType t);
/// |t| <= |t'| without overflowing 2^64.
bool prim_size_le(PrimType a, PrimType b);

/// A set of permissions drawn from {Discard, Share, Escape}, stored as a 3-bit mask.
class Kind {
 public:
  static constexpr std::uint8_t kDiscard = 1;
  static constexpr std::uint8_t kShare = 2;
  static constexpr std::uint8_t kEscape = 4;

  constexpr Kind() = default;
  constexpr explicit Kind(std::uint8_t bits) : bits_(bits & 7) {}

  static constexpr Kind none() { return Kind{0}; }
  static constexpr Kind all() { return Kind{7}; }
  static constexpr Kind discard() { return Kind{kDiscard}; }
  static constexpr Kind share() { return Kind{kShare}; }
  static constexpr Kind escape() { return Kind{kEscape}; }
  static constexpr Kind discard_share() { return Kind{kDiscard | kShare}; }

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool has(std::uint8_t perm) const { return (bits_ & perm) != 0; }
  constexpr bool subset_of(Kind other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr Kind operator&(Kind other) const { return Kind(bits_ & other.bits_); }
  constexpr Kind operator|(Kind other) const { return Kind(bits_ | other.bits_); }
  friend constexpr bool operator==(Kind, Kind) = default;

  /// Sorted subset string over "DSE", e.g. "DS" or "" for the empty kind.
  std::string to_string() const;

 private:
  std::uint8_t bits_ = 0;
};

struct Type;
using TypeRef = std::shared_ptr<const Type>;

struct TVar { std::string name; };
struct TVarObserved { std::string name; };
struct TUnit {};
struct TPrim { PrimType prim; };
struct TFun { TypeRef arg; TypeRef result; };
struct Alternative {
  std::string ctor;
  TypeRef type;
};
struct TVariant { std::vector<Alternative> alts; };
struct FieldType {
  std::string name;
  TypeRef type;
  bool taken = false;
};
struct TRecord {
  std::vector<FieldType> fields;
  Mode mode = Mode::Unboxed;
};
struct TAbstract {
  std::string name;
  std::vector<TypeRef> args;
  Mode mode = Mode::Unboxed;
};

struct Type {
  std::variant<TVar, TVarObserved, TUnit, TPrim, TFun, TVariant, TRecord, TAbstract> node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

TypeRef t_var(std::string name);
TypeRef t_observed(std::string name);
TypeRef t_unit();
TypeRef t_prim(PrimType p);
TypeRef t_bool();
TypeRef t_fun(TypeRef arg, TypeRef result);
TypeRef t_variant(std::vector<Alternative> alts);
TypeRef t_record(std::vector<FieldType> fields, Mode mode);
TypeRef t_abstract(std::string name, std::vector<TypeRef> args, Mode mode);

/// Structural equality; variant alternatives are compared as a set keyed by constructor.
bool type_equal(const Type& a, const Type& b);
inline bool type_equal(const TypeRef& a, const TypeRef& b) { return type_equal(*a, *b); }

/// Canonical text (variants sorted by constructor); equal keys iff type_equal.
std::string type_key(const Type& t);

/// Source-syntax rendering that preserves alternative order.
std::string type_to_string(const Type& t);
inline std::string type_to_string(const TypeRef& t) { return type_to_string(*t); }

/// True when the type mentions no type variables.
bool is_ground(const Type& t);
void collect_type_vars(const Type& t, std::set<std::string>& out);

const Alternative* find_alt(const TVariant& v, std::string_view ctor);
std::optional<std::size_t> find_field(const TRecord& r, std::string_view name);

struct PolyType {
  std::vector<std::pair<std::string, Kind>> binders;
  TypeRef body;  // always a TFun

  const TFun& fun() const { return *body->as<TFun>(); }
};

// ---------------------------------------------------------------------------
// Expressions

enum class PrimOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod,
  BitAnd, BitOr, BitXor, Shl, Shr, Complement,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Not,
};

std::string_view primop_name(PrimOp op);
std::optional<PrimOp> primop_from_name(std::string_view name);

struct Expr;
using ExprRef = std::shared_ptr<const Expr>;

namespace ex {
struct Var { std::string name; };
struct Unit {};
struct FunRef {
  std::string name;
  std::vector<TypeRef> type_args;
};
struct PrimOpE {
  PrimOp op;
  std::vector<ExprRef> args;
};
struct App { ExprRef fn; ExprRef arg; };
struct Let {
  std::string name;
  ExprRef bound;
  ExprRef body;
};
struct LetBang {
  std::vector<std::string> observed;
  std::string name;
  ExprRef bound;
  ExprRef body;
};
struct If { ExprRef cond; ExprRef then_branch; ExprRef else_branch; };
struct Lit {
  std::uint64_t value = 0;
  PrimType type = PrimType::U32;
};
struct Cast { PrimType target; ExprRef operand; };
struct Promote {
  std::vector<Alternative> target;
  ExprRef operand;
};
struct Case {
  ExprRef scrutinee;
  std::string ctor;
  std::string match_var;
  ExprRef match_body;
  std::string else_var;
  ExprRef else_body;
};
struct Esac { ExprRef operand; };
struct Con { std::string ctor; ExprRef operand; };
struct Struct { std::vector<std::pair<std::string, ExprRef>> fields; };
struct Member { ExprRef record; std::string field; };
struct Put { ExprRef record; std::string field; ExprRef value; };
struct Take {
  std::string record_var;
  std::string field;
  std::string field_var;
  ExprRef record;
  ExprRef body;
};
/// Multi-way match; only exists before desugaring.
struct MatchArm {
  std::string ctor;
  std::string var;
  ExprRef body;
};
struct Match {
  ExprRef scrutinee;
  std::vector<MatchArm> arms;
};
}  // namespace ex

struct Expr {
  using Node = std::variant<ex::Var, ex::Unit, ex::FunRef, ex::PrimOpE, ex::App, ex::Let, ex::LetBang,
                            ex::If, ex::Lit, ex::Cast, ex::Promote, ex::Case, ex::Esac, ex::Con,
                            ex::Struct, ex::Member, ex::Put, ex::Take, ex::Match>;
  Node node;
  Span span;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

ExprRef make_expr(Expr::Node node, Span span = {});

/// Free variables, respecting every binder.
std::set<std::string> free_vars(const Expr& e);
/// Every variable name bound or used anywhere inside e.
void collect_names(const Expr& e, std::set<std::string>& out);
/// Names of functions referenced through FunRef.
void collect_funrefs(const Expr& e, std::set<std::string>& out);

/// Structural equality ignoring spans.
bool expr_equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Definitions and programs

struct FunDef {
  std::string name;
  PolyType signature;
  std::string param;
  ExprRef body;
};

/// When an abstract function is a monomorphic copy of a polymorphic one, the
/// original name and type arguments it was specialised from.
struct AbsInstance {
  std::string name;
  std::vector<TypeRef> type_args;
};

struct AbsFunDecl {
  std::string name;
  PolyType signature;
  std::optional<AbsInstance> instance_of;
};

struct Def {
  std::variant<FunDef, AbsFunDecl> node;
  Span span;

  const std::string& name() const;
  const PolyType& signature() const;
  const FunDef* fun() const { return std::get_if<FunDef>(&node); }
  const AbsFunDecl* abs() const { return std::get_if<AbsFunDecl>(&node); }
};

class Program {
 public:
  Program() = default;
  /// Throws DuplicateDefinition.
  explicit Program(std::vector<Def> defs);

  const std::vector<Def>& defs() const { return defs_; }
  const Def* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

 private:
  std::vector<Def> defs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace cogent
