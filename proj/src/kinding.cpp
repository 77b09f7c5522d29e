#include "cogent/kinding.hpp"

#include <set>

namespace cogent {

KindContext::KindContext(std::vector<std::pair<std::string, Kind>> bindings)
    : bindings_(std::move(bindings)) {
  std::set<std::string_view> seen;
  for (const auto& b : bindings_)
    if (!seen.insert(b.first).second)
      throw Error(ErrorCode::DuplicateBinder, "duplicate type variable '" + b.first + "'");
}

const Kind* KindContext::find(std::string_view name) const {
  for (const auto& b : bindings_)
    if (b.first == name) return &b.second;
  return nullptr;
}

Kind mode_kind(Mode m) {
  switch (m) {
    case Mode::ReadOnly: return Kind::discard_share();
    case Mode::Writable: return Kind::escape();
    case Mode::Unboxed: return Kind::all();
  }
  return Kind::none();
}

Mode bang_mode(Mode m) { return m == Mode::Writable ? Mode::ReadOnly : m; }

Kind bang_kind(Kind k) {
  return Kind::discard_share().subset_of(k) ? k : Kind::discard_share();
}

TypeRef bang_type(const TypeRef& t) {
  return std::visit(
      [&](const auto& x) -> TypeRef {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TVar>) {
          return t_observed(x.name);
        } else if constexpr (std::is_same_v<T, TVariant>) {
          std::vector<Alternative> alts;
          for (const auto& a : x.alts) alts.push_back({a.ctor, bang_type(a.type)});
          return t_variant(std::move(alts));
        } else if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<FieldType> fields;
          for (const auto& f : x.fields) fields.push_back({f.name, bang_type(f.type), f.taken});
          return t_record(std::move(fields), bang_mode(x.mode));
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          std::vector<TypeRef> args;
          for (const auto& a : x.args) args.push_back(bang_type(a));
          return t_abstract(x.name, std::move(args), bang_mode(x.mode));
        } else {
          // observed variables, unit, primitives and functions are fixed points
          return t;
        }
      },
      t->node);
}

Kind max_kind(const KindContext& delta, const Type& t) {
  return std::visit(
      [&](const auto& x) -> Kind {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TVarObserved>) {
          const Kind* k = delta.find(x.name);
          if (!k) throw Error(ErrorCode::UnboundTypeVariable, "unbound type variable '" + x.name + "'");
          if constexpr (std::is_same_v<T, TVarObserved>) return bang_kind(*k);
          else return *k;
        } else if constexpr (std::is_same_v<T, TVariant>) {
          Kind k = Kind::all();
          for (const auto& a : x.alts) k = k & max_kind(delta, *a.type);
          return k;
        } else if constexpr (std::is_same_v<T, TRecord>) {
          Kind k = mode_kind(x.mode);
          for (const auto& f : x.fields)
            if (!f.taken) k = k & max_kind(delta, *f.type);
          return k;
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          Kind k = mode_kind(x.mode);
          for (const auto& a : x.args) k = k & max_kind(delta, *a);
          return k;
        } else {
          return Kind::all();
        }
      },
      t.node);
}

bool kind_check(const KindContext& delta, const Type& t, Kind k) {
  return k.subset_of(max_kind(delta, t));
}

TypeRef subst_type(const TypeRef& t, const TypeSubst& subst) {
  if (subst.empty()) return t;
  return std::visit(
      [&](const auto& x) -> TypeRef {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TVar>) {
          auto it = subst.find(x.name);
          return it == subst.end() ? t : it->second;
        } else if constexpr (std::is_same_v<T, TVarObserved>) {
          auto it = subst.find(x.name);
          return it == subst.end() ? t : bang_type(it->second);
        } else if constexpr (std::is_same_v<T, TFun>) {
          return t_fun(subst_type(x.arg, subst), subst_type(x.result, subst));
        } else if constexpr (std::is_same_v<T, TVariant>) {
          std::vector<Alternative> alts;
          for (const auto& a : x.alts) alts.push_back({a.ctor, subst_type(a.type, subst)});
          return t_variant(std::move(alts));
        } else if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<FieldType> fields;
          for (const auto& f : x.fields) fields.push_back({f.name, subst_type(f.type, subst), f.taken});
          return t_record(std::move(fields), x.mode);
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          std::vector<TypeRef> args;
          for (const auto& a : x.args) args.push_back(subst_type(a, subst));
          return t_abstract(x.name, std::move(args), x.mode);
        } else {
          return t;
        }
      },
      t->node);
}

TypeSubst make_subst(const PolyType& poly, const std::vector<TypeRef>& args, Span span) {
  if (poly.binders.size() != args.size())
    throw Error(ErrorCode::ArityError,
                "expected " + std::to_string(poly.binders.size()) + " type arguments, found " +
                    std::to_string(args.size()),
                span);
  TypeSubst s;
  for (std::size_t i = 0; i < args.size(); ++i) s.emplace(poly.binders[i].first, args[i]);
  return s;
}

void check_type_vars_bound(const KindContext& delta, const Type& t, Span span) {
  std::set<std::string> vars;
  collect_type_vars(t, vars);
  for (const auto& v : vars)
    if (!delta.find(v)) throw Error(ErrorCode::UnboundTypeVariable, "unbound type variable '" + v + "'", span);
}

namespace {

std::vector<TypeRef> subst_all(const std::vector<TypeRef>& ts, const TypeSubst& s) {
  std::vector<TypeRef> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(subst_type(t, s));
  return out;
}

}  // namespace

ExprRef subst_expr(const ExprRef& e, const TypeSubst& s) {
  if (s.empty()) return e;
  auto rec = [&](const ExprRef& c) { return subst_expr(c, s); };
  Expr::Node node = std::visit(
      [&](const auto& x) -> Expr::Node {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::FunRef>) {
          return ex::FunRef{x.name, subst_all(x.type_args, s)};
        } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          std::vector<ExprRef> args;
          for (const auto& a : x.args) args.push_back(rec(a));
          return ex::PrimOpE{x.op, std::move(args)};
        } else if constexpr (std::is_same_v<T, ex::App>) {
          return ex::App{rec(x.fn), rec(x.arg)};
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          return ex::Let{x.name, rec(x.bound), rec(x.body)};
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          return ex::LetBang{x.observed, x.name, rec(x.bound), rec(x.body)};
        } else if constexpr (std::is_same_v<T, ex::If>) {
          return ex::If{rec(x.cond), rec(x.then_branch), rec(x.else_branch)};
        } else if constexpr (std::is_same_v<T, ex::Cast>) {
          return ex::Cast{x.target, rec(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          std::vector<Alternative> alts;
          for (const auto& a : x.target) alts.push_back({a.ctor, subst_type(a.type, s)});
          return ex::Promote{std::move(alts), rec(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          return ex::Case{rec(x.scrutinee), x.ctor, x.match_var, rec(x.match_body), x.else_var,
                          rec(x.else_body)};
        } else if constexpr (std::is_same_v<T, ex::Esac>) {
          return ex::Esac{rec(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Con>) {
          return ex::Con{x.ctor, rec(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          std::vector<std::pair<std::string, ExprRef>> fields;
          for (const auto& f : x.fields) fields.emplace_back(f.first, rec(f.second));
          return ex::Struct{std::move(fields)};
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          return ex::Member{rec(x.record), x.field};
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          return ex::Put{rec(x.record), x.field, rec(x.value)};
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          return ex::Take{x.record_var, x.field, x.field_var, rec(x.record), rec(x.body)};
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          std::vector<ex::MatchArm> arms;
          for (const auto& a : x.arms) arms.push_back({a.ctor, a.var, rec(a.body)});
          return ex::Match{rec(x.scrutinee), std::move(arms)};
        } else {
          return x;
        }
      },
      e->node);
  return make_expr(std::move(node), e->span);
}

}  // namespace cogent
