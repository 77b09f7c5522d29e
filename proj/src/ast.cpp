#include "cogent/ast.hpp"

#include <algorithm>
#include <sstream>

namespace cogent {

std::string_view prim_name(PrimType t) {
  switch (t) {
    case PrimType::U8: return "u8";
    case PrimType::U16: return "u16";
    case PrimType::U32: return "u32";
    case PrimType::U64: return "u64";
    case PrimType::Bool: return "bool";
  }
  return "?";
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::ReadOnly: return "ro";
    case Mode::Writable: return "wr";
    case Mode::Unboxed: return "ub";
  }
  return "?";
}

unsigned prim_bits(PrimType t) {
  switch (t) {
    case PrimType::U8: return 8;
    case PrimType::U16: return 16;
    case PrimType::U32: return 32;
    case PrimType::U64: return 64;
    case PrimType::Bool: return 1;
  }
  return 0;
}

std::uint64_t prim_max_literal(PrimType t) {
  const unsigned bits = prim_bits(t);
  return bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

bool prim_size_le(PrimType a, PrimType b) { return prim_max_literal(a) <= prim_max_literal(b); }

std::string Kind::to_string() const {
  std::string s;
  if (has(kDiscard)) s += 'D';
  if (has(kShare)) s += 'S';
  if (has(kEscape)) s += 'E';
  return s;
}

namespace {
TypeRef mk(decltype(Type::node) n) { return std::make_shared<const Type>(Type{std::move(n)}); }
}  // namespace

TypeRef t_var(std::string name) { return mk(TVar{std::move(name)}); }
TypeRef t_observed(std::string name) { return mk(TVarObserved{std::move(name)}); }
TypeRef t_unit() {
  static const TypeRef unit = mk(TUnit{});
  return unit;
}
TypeRef t_prim(PrimType p) { return mk(TPrim{p}); }
TypeRef t_bool() { return t_prim(PrimType::Bool); }
TypeRef t_fun(TypeRef arg, TypeRef result) { return mk(TFun{std::move(arg), std::move(result)}); }
TypeRef t_variant(std::vector<Alternative> alts) { return mk(TVariant{std::move(alts)}); }
TypeRef t_record(std::vector<FieldType> fields, Mode mode) {
  return mk(TRecord{std::move(fields), mode});
}
TypeRef t_abstract(std::string name, std::vector<TypeRef> args, Mode mode) {
  return mk(TAbstract{std::move(name), std::move(args), mode});
}

const Alternative* find_alt(const TVariant& v, std::string_view ctor) {
  for (const auto& a : v.alts)
    if (a.ctor == ctor) return &a;
  return nullptr;
}

std::optional<std::size_t> find_field(const TRecord& r, std::string_view name) {
  for (std::size_t i = 0; i < r.fields.size(); ++i)
    if (r.fields[i].name == name) return i;
  return std::nullopt;
}

bool type_equal(const Type& a, const Type& b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TVarObserved>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, TUnit>) {
          return true;
        } else if constexpr (std::is_same_v<T, TPrim>) {
          return x.prim == y.prim;
        } else if constexpr (std::is_same_v<T, TFun>) {
          return type_equal(*x.arg, *y.arg) && type_equal(*x.result, *y.result);
        } else if constexpr (std::is_same_v<T, TVariant>) {
          if (x.alts.size() != y.alts.size()) return false;
          for (const auto& alt : x.alts) {
            const Alternative* other = find_alt(y, alt.ctor);
            if (!other || !type_equal(*alt.type, *other->type)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, TRecord>) {
          if (x.mode != y.mode || x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i) {
            const auto& f = x.fields[i];
            const auto& g = y.fields[i];
            if (f.name != g.name || f.taken != g.taken || !type_equal(*f.type, *g.type)) return false;
          }
          return true;
        } else {
          if (x.name != y.name || x.mode != y.mode || x.args.size() != y.args.size()) return false;
          for (std::size_t i = 0; i < x.args.size(); ++i)
            if (!type_equal(*x.args[i], *y.args[i])) return false;
          return true;
        }
      },
      a.node);
}

namespace {

void print_type(std::ostream& os, const Type& t, bool canonical) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TVar>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, TVarObserved>) {
          os << "(! " << x.name << ')';
        } else if constexpr (std::is_same_v<T, TUnit>) {
          os << "unit";
        } else if constexpr (std::is_same_v<T, TPrim>) {
          os << prim_name(x.prim);
        } else if constexpr (std::is_same_v<T, TFun>) {
          os << "(fun ";
          print_type(os, *x.arg, canonical);
          os << ' ';
          print_type(os, *x.result, canonical);
          os << ')';
        } else if constexpr (std::is_same_v<T, TVariant>) {
          std::vector<const Alternative*> alts;
          for (const auto& a : x.alts) alts.push_back(&a);
          if (canonical)
            std::sort(alts.begin(), alts.end(),
                      [](const Alternative* l, const Alternative* r) { return l->ctor < r->ctor; });
          os << "(variant";
          for (const Alternative* a : alts) {
            os << " (" << a->ctor << ' ';
            print_type(os, *a->type, canonical);
            os << ')';
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, TRecord>) {
          os << "(rec " << mode_name(x.mode);
          for (const auto& f : x.fields) {
            os << " (" << f.name << ' ';
            print_type(os, *f.type, canonical);
            if (f.taken) os << " taken";
            os << ')';
          }
          os << ')';
        } else {
          os << "(abs " << x.name << ' ' << mode_name(x.mode);
          for (const auto& arg : x.args) {
            os << ' ';
            print_type(os, *arg, canonical);
          }
          os << ')';
        }
      },
      t.node);
}

}  // namespace

std::string type_key(const Type& t) {
  std::ostringstream os;
  print_type(os, t, true);
  return os.str();
}

std::string type_to_string(const Type& t) {
  std::ostringstream os;
  print_type(os, t, false);
  return os.str();
}

void collect_type_vars(const Type& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TVarObserved>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, TFun>) {
          collect_type_vars(*x.arg, out);
          collect_type_vars(*x.result, out);
        } else if constexpr (std::is_same_v<T, TVariant>) {
          for (const auto& a : x.alts) collect_type_vars(*a.type, out);
        } else if constexpr (std::is_same_v<T, TRecord>) {
          for (const auto& f : x.fields) collect_type_vars(*f.type, out);
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          for (const auto& a : x.args) collect_type_vars(*a, out);
        }
      },
      t.node);
}

bool is_ground(const Type& t) {
  std::set<std::string> vars;
  collect_type_vars(t, vars);
  return vars.empty();
}

// ---------------------------------------------------------------------------

std::string_view primop_name(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
    case PrimOp::Mod: return "%";
    case PrimOp::BitAnd: return "&";
    case PrimOp::BitOr: return "|";
    case PrimOp::BitXor: return "^";
    case PrimOp::Shl: return "<<";
    case PrimOp::Shr: return ">>";
    case PrimOp::Complement: return "~";
    case PrimOp::Eq: return "==";
    case PrimOp::Ne: return "!=";
    case PrimOp::Lt: return "<";
    case PrimOp::Le: return "<=";
    case PrimOp::Gt: return ">";
    case PrimOp::Ge: return ">=";
    case PrimOp::And: return "and";
    case PrimOp::Or: return "or";
    case PrimOp::Not: return "not";
  }
  return "?";
}

std::optional<PrimOp> primop_from_name(std::string_view name) {
  static constexpr PrimOp all[] = {
      PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Div, PrimOp::Mod,
      PrimOp::BitAnd, PrimOp::BitOr, PrimOp::BitXor, PrimOp::Shl, PrimOp::Shr,
      PrimOp::Complement, PrimOp::Eq, PrimOp::Ne, PrimOp::Lt, PrimOp::Le,
      PrimOp::Gt, PrimOp::Ge, PrimOp::And, PrimOp::Or, PrimOp::Not};
  for (PrimOp op : all)
    if (primop_name(op) == name) return op;
  if (name == "&&") return PrimOp::And;
  if (name == "||") return PrimOp::Or;
  return std::nullopt;
}

ExprRef make_expr(Expr::Node node, Span span) {
  return std::make_shared<const Expr>(Expr{std::move(node), span});
}

namespace {

void fv_into(const Expr& e, std::set<std::string>& out);

std::set<std::string> fv_minus(const Expr& e, std::initializer_list<std::string_view> bound) {
  std::set<std::string> s;
  fv_into(e, s);
  for (auto b : bound) s.erase(std::string(b));
  return s;
}

void fv_into(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::Var>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          for (const auto& a : x.args) fv_into(*a, out);
        } else if constexpr (std::is_same_v<T, ex::App>) {
          fv_into(*x.fn, out);
          fv_into(*x.arg, out);
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          fv_into(*x.bound, out);
          auto body = fv_minus(*x.body, {x.name});
          out.insert(body.begin(), body.end());
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          out.insert(x.observed.begin(), x.observed.end());
          fv_into(*x.bound, out);
          auto body = fv_minus(*x.body, {x.name});
          out.insert(body.begin(), body.end());
        } else if constexpr (std::is_same_v<T, ex::If>) {
          fv_into(*x.cond, out);
          fv_into(*x.then_branch, out);
          fv_into(*x.else_branch, out);
        } else if constexpr (std::is_same_v<T, ex::Cast> || std::is_same_v<T, ex::Promote> ||
                             std::is_same_v<T, ex::Esac> || std::is_same_v<T, ex::Con>) {
          fv_into(*x.operand, out);
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          fv_into(*x.scrutinee, out);
          auto m = fv_minus(*x.match_body, {x.match_var});
          auto el = fv_minus(*x.else_body, {x.else_var});
          out.insert(m.begin(), m.end());
          out.insert(el.begin(), el.end());
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          for (const auto& f : x.fields) fv_into(*f.second, out);
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          fv_into(*x.record, out);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          fv_into(*x.record, out);
          fv_into(*x.value, out);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          fv_into(*x.record, out);
          auto body = fv_minus(*x.body, {x.record_var, x.field_var});
          out.insert(body.begin(), body.end());
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          fv_into(*x.scrutinee, out);
          for (const auto& arm : x.arms) {
            auto b = fv_minus(*arm.body, {arm.var});
            out.insert(b.begin(), b.end());
          }
        }
      },
      e.node);
}

template <class F>
void for_each_child(const Expr& e, F&& f) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          for (const auto& a : x.args) f(*a);
        } else if constexpr (std::is_same_v<T, ex::App>) {
          f(*x.fn);
          f(*x.arg);
        } else if constexpr (std::is_same_v<T, ex::Let> || std::is_same_v<T, ex::LetBang>) {
          f(*x.bound);
          f(*x.body);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          f(*x.cond);
          f(*x.then_branch);
          f(*x.else_branch);
        } else if constexpr (std::is_same_v<T, ex::Cast> || std::is_same_v<T, ex::Promote> ||
                             std::is_same_v<T, ex::Esac> || std::is_same_v<T, ex::Con>) {
          f(*x.operand);
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          f(*x.scrutinee);
          f(*x.match_body);
          f(*x.else_body);
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          for (const auto& fl : x.fields) f(*fl.second);
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          f(*x.record);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          f(*x.record);
          f(*x.value);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          f(*x.record);
          f(*x.body);
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          f(*x.scrutinee);
          for (const auto& arm : x.arms) f(*arm.body);
        }
      },
      e.node);
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  fv_into(e, out);
  return out;
}

void collect_names(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::Var>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          out.insert(x.name);
          out.insert(x.observed.begin(), x.observed.end());
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          out.insert(x.match_var);
          out.insert(x.else_var);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          out.insert(x.record_var);
          out.insert(x.field_var);
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          for (const auto& arm : x.arms) out.insert(arm.var);
        }
      },
      e.node);
  for_each_child(e, [&](const Expr& c) { collect_names(c, out); });
}

void collect_funrefs(const Expr& e, std::set<std::string>& out) {
  if (const auto* f = e.as<ex::FunRef>()) out.insert(f->name);
  for_each_child(e, [&](const Expr& c) { collect_funrefs(c, out); });
}

namespace {

bool types_equal(const std::vector<TypeRef>& a, const std::vector<TypeRef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_equal(*a[i], *b[i])) return false;
  return true;
}

bool alts_equal(const std::vector<Alternative>& a, const std::vector<Alternative>& b) {
  return type_equal(*t_variant(a), *t_variant(b));
}

}  // namespace

bool expr_equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        auto eq = [](const ExprRef& l, const ExprRef& r) { return expr_equal(*l, *r); };
        if constexpr (std::is_same_v<T, ex::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, ex::Unit>) {
          return true;
        } else if constexpr (std::is_same_v<T, ex::FunRef>) {
          return x.name == y.name && types_equal(x.type_args, y.type_args);
        } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          if (x.op != y.op || x.args.size() != y.args.size()) return false;
          for (std::size_t i = 0; i < x.args.size(); ++i)
            if (!eq(x.args[i], y.args[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, ex::App>) {
          return eq(x.fn, y.fn) && eq(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          return x.name == y.name && eq(x.bound, y.bound) && eq(x.body, y.body);
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          return x.observed == y.observed && x.name == y.name && eq(x.bound, y.bound) &&
                 eq(x.body, y.body);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          return eq(x.cond, y.cond) && eq(x.then_branch, y.then_branch) &&
                 eq(x.else_branch, y.else_branch);
        } else if constexpr (std::is_same_v<T, ex::Lit>) {
          return x.value == y.value && x.type == y.type;
        } else if constexpr (std::is_same_v<T, ex::Cast>) {
          return x.target == y.target && eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          return alts_equal(x.target, y.target) && eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          return x.ctor == y.ctor && x.match_var == y.match_var && x.else_var == y.else_var &&
                 eq(x.scrutinee, y.scrutinee) && eq(x.match_body, y.match_body) &&
                 eq(x.else_body, y.else_body);
        } else if constexpr (std::is_same_v<T, ex::Esac>) {
          return eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, ex::Con>) {
          return x.ctor == y.ctor && eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          if (x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i)
            if (x.fields[i].first != y.fields[i].first || !eq(x.fields[i].second, y.fields[i].second))
              return false;
          return true;
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          return x.field == y.field && eq(x.record, y.record);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          return x.field == y.field && eq(x.record, y.record) && eq(x.value, y.value);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          return x.record_var == y.record_var && x.field == y.field && x.field_var == y.field_var &&
                 eq(x.record, y.record) && eq(x.body, y.body);
        } else {
          if (x.arms.size() != y.arms.size() || !eq(x.scrutinee, y.scrutinee)) return false;
          for (std::size_t i = 0; i < x.arms.size(); ++i) {
            const auto& l = x.arms[i];
            const auto& r = y.arms[i];
            if (l.ctor != r.ctor || l.var != r.var || !eq(l.body, r.body)) return false;
          }
          return true;
        }
      },
      a.node);
}

// ---------------------------------------------------------------------------

const std::string& Def::name() const {
  return std::visit([](const auto& d) -> const std::string& { return d.name; }, node);
}

const PolyType& Def::signature() const {
  return std::visit([](const auto& d) -> const PolyType& { return d.signature; }, node);
}

Program::Program(std::vector<Def> defs) : defs_(std::move(defs)) {
  for (std::size_t i = 0; i < defs_.size(); ++i) {
    auto [it, inserted] = index_.emplace(defs_[i].name(), i);
    if (!inserted)
      throw Error(ErrorCode::DuplicateDefinition, "duplicate definition of '" + defs_[i].name() + "'",
                  defs_[i].span);
  }
}

const Def* Program::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &defs_[it->second];
}

}  // namespace cogent
