#include "cogent/typecheck.hpp"

#include <algorithm>
#include <functional>

namespace cogent {

const CtxBinding* TypeContext::find(std::string_view name) const {
  for (const auto& b : bindings_)
    if (b.name == name) return &b;
  return nullptr;
}

std::vector<std::string> TypeContext::names() const {
  std::vector<std::string> out;
  for (const auto& b : bindings_) out.push_back(b.name);
  return out;
}

TypeContext TypeContext::restrict_to(const std::set<std::string>& names) const {
  std::vector<CtxBinding> out;
  for (const auto& b : bindings_)
    if (names.count(b.name)) out.push_back(b);
  return TypeContext(std::move(out));
}

TypeContext TypeContext::without(const std::set<std::string>& names) const {
  std::vector<CtxBinding> out;
  for (const auto& b : bindings_)
    if (!names.count(b.name)) out.push_back(b);
  return TypeContext(std::move(out));
}

std::pair<TypeContext, TypeContext> split_context(const KindContext& delta, const TypeContext& gamma,
                                                  const std::set<std::string>& fv1,
                                                  const std::set<std::string>& fv2, Span span) {
  std::vector<CtxBinding> left;
  std::vector<CtxBinding> right;
  for (const auto& b : gamma.bindings()) {
    const bool l = fv1.count(b.name) > 0;
    const bool r = fv2.count(b.name) > 0;
    if (l && r && !kind_check(delta, *b.type, Kind::share()))
      throw Error(ErrorCode::ShareViolation,
                  "variable '" + b.name + "' of non-shareable type " + type_to_string(b.type) +
                      " is used more than once",
                  span);
    if (l) left.push_back(b);
    if (r) right.push_back(b);
  }
  return {TypeContext(std::move(left)), TypeContext(std::move(right))};
}

TypeContext weaken_context(const KindContext& delta, const TypeContext& gamma,
                           const std::set<std::string>& keep, Span span) {
  for (const auto& b : gamma.bindings())
    if (!keep.count(b.name) && !kind_check(delta, *b.type, Kind::discard()))
      throw Error(ErrorCode::DiscardViolation,
                  "variable '" + b.name + "' of non-discardable type " + type_to_string(b.type) +
                      " is never used",
                  span);
  return gamma.restrict_to(keep);
}

namespace {

std::set<std::string> minus(std::set<std::string> s, std::initializer_list<std::string_view> names) {
  for (auto n : names) s.erase(std::string(n));
  return s;
}

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

[[noreturn]] void mismatch(const Expr& e, const std::string& what, const TypeRef& expected,
                           const TypeRef& found) {
  throw Error(ErrorCode::TypeMismatch,
              what + ": expected " + type_to_string(expected) + ", found " + type_to_string(found),
              e.span);
}

const TRecord& expect_record(const Expr& e, const TypeRef& t) {
  const auto* r = t->as<TRecord>();
  if (!r) throw Error(ErrorCode::TypeMismatch, "expected a record, found " + type_to_string(t), e.span);
  return *r;
}

const TVariant& expect_variant(const Expr& e, const TypeRef& t) {
  const auto* v = t->as<TVariant>();
  if (!v) throw Error(ErrorCode::TypeMismatch, "expected a variant, found " + type_to_string(t), e.span);
  return *v;
}

PrimType expect_prim(const Expr& e, const TypeRef& t) {
  const auto* p = t->as<TPrim>();
  if (!p) throw Error(ErrorCode::TypeMismatch, "expected a primitive type, found " + type_to_string(t), e.span);
  return p->prim;
}

class Checker {
 public:
  Checker(const Program& program, const KindContext& delta) : program_(program), delta_(delta) {}

  TypingTree check(const TypeContext& gamma, const Expr& e) {
    TypingTree node;
    node.expr = &e;
    node.span = e.span;
    node.gamma = gamma.bindings();
    const std::set<std::string> fv = free_vars(e);
    for (const auto& b : gamma.bindings())
      if (!fv.count(b.name)) node.weakened.push_back(b.name);
    const TypeContext ctx = weaken_context(delta_, gamma, fv, e.span);
    std::visit([&](const auto& x) { rule(node, ctx, e, x); }, e.node);
    return node;
  }

 private:
  std::pair<TypeContext, TypeContext> split(TypingTree& node, const TypeContext& ctx, const Expr& e,
                                            const std::set<std::string>& fv1,
                                            const std::set<std::string>& fv2) {
    auto parts = split_context(delta_, ctx, fv1, fv2, e.span);
    SplitRecord rec;
    rec.left = parts.first.names();
    rec.right = parts.second.names();
    for (const auto& n : rec.left)
      if (parts.second.contains(n)) rec.shared.push_back(n);
    node.splits.push_back(std::move(rec));
    return parts;
  }

  /// Prepends bindings; a binding hidden by a new one of the same name is lost
  /// and therefore must be discardable.
  TypeContext extend(const TypeContext& ctx, std::vector<CtxBinding> fresh, const Expr& e) {
    std::vector<CtxBinding> out;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      bool hidden = false;
      for (std::size_t j = i + 1; j < fresh.size(); ++j) hidden = hidden || fresh[j].name == fresh[i].name;
      if (hidden) {
        if (!kind_check(delta_, *fresh[i].type, Kind::discard()))
          throw Error(ErrorCode::DiscardViolation,
                      "binding '" + fresh[i].name + "' of non-discardable type " +
                          type_to_string(fresh[i].type) + " is shadowed before use",
                      e.span);
        continue;
      }
      out.push_back(fresh[i]);
    }
    std::reverse(out.begin(), out.end());
    for (const auto& b : ctx.bindings()) {
      if (std::any_of(out.begin(), out.end(), [&](const CtxBinding& n) { return n.name == b.name; })) {
        if (!kind_check(delta_, *b.type, Kind::discard()))
          throw Error(ErrorCode::DiscardViolation,
                      "binding '" + b.name + "' of non-discardable type " + type_to_string(b.type) +
                          " is shadowed before use",
                      e.span);
        continue;
      }
      out.push_back(b);
    }
    return TypeContext(std::move(out));
  }

  void well_formed(const TypeRef& t, const Expr& e) { check_type_vars_bound(delta_, *t, e.span); }

  /// Premises checked left to right, each split off from the remainder.
  std::vector<TypeRef> check_list(TypingTree& node, const TypeContext& ctx, const Expr& e,
                                  const std::vector<const Expr*>& items) {
    std::vector<TypeRef> types;
    TypeContext rest = ctx;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::set<std::string> fv_rest;
      for (std::size_t j = i + 1; j < items.size(); ++j) fv_rest = unite(std::move(fv_rest), free_vars(*items[j]));
      auto [head, tail] = split(node, rest, e, free_vars(*items[i]), fv_rest);
      node.children.push_back(check(head, *items[i]));
      types.push_back(node.children.back().type);
      rest = std::move(tail);
    }
    return types;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Var& x) {
    node.rule = "Var";
    const CtxBinding* b = ctx.find(x.name);
    if (!b) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + x.name + "'", e.span);
    node.type = b->type;
  }

  void rule(TypingTree& node, const TypeContext&, const Expr&, const ex::Unit&) {
    node.rule = "Unit";
    node.type = t_unit();
  }

  void rule(TypingTree& node, const TypeContext&, const Expr& e, const ex::Lit& x) {
    node.rule = "Literal";
    if (x.value > prim_max_literal(x.type))
      throw Error(ErrorCode::LiteralOutOfRange,
                  "literal " + std::to_string(x.value) + " does not fit in " + std::string(prim_name(x.type)),
                  e.span);
    node.type = t_prim(x.type);
  }

  void rule(TypingTree& node, const TypeContext&, const Expr& e, const ex::FunRef& x) {
    node.rule = "Fun";
    const Def* def = program_.find(x.name);
    if (!def) throw Error(ErrorCode::UnknownFunction, "unknown function '" + x.name + "'", e.span);
    const PolyType& sig = def->signature();
    TypeSubst subst = make_subst(sig, x.type_args, e.span);
    for (std::size_t i = 0; i < x.type_args.size(); ++i) {
      well_formed(x.type_args[i], e);
      const auto& [var, kind] = sig.binders[i];
      if (!kind_check(delta_, *x.type_args[i], kind))
        throw Error(ErrorCode::KindViolation,
                    "type argument " + type_to_string(x.type_args[i]) + " for '" + var +
                        "' does not have kind {" + kind.to_string() + "}",
                    e.span);
    }
    node.type = subst_type(sig.body, subst);
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::PrimOpE& x) {
    node.rule = "PrimOp";
    std::vector<const Expr*> items;
    for (const auto& a : x.args) items.push_back(a.get());
    const auto types = check_list(node, ctx, e, items);
    const bool unary = x.op == PrimOp::Not || x.op == PrimOp::Complement;
    if (types.size() != (unary ? 1u : 2u))
      throw Error(ErrorCode::ArityError,
                  "operator '" + std::string(primop_name(x.op)) + "' expects " + (unary ? "1" : "2") +
                      " operands, found " + std::to_string(types.size()),
                  e.span);
    std::vector<PrimType> prims;
    for (std::size_t i = 0; i < types.size(); ++i) prims.push_back(expect_prim(*items[i], types[i]));
    if (prims.size() == 2 && prims[0] != prims[1]) mismatch(e, "operand types differ", types[0], types[1]);
    const PrimType t = prims[0];
    switch (x.op) {
      case PrimOp::And:
      case PrimOp::Or:
      case PrimOp::Not:
        if (t != PrimType::Bool) mismatch(e, "logical operator", t_bool(), types[0]);
        node.type = t_bool();
        break;
      case PrimOp::Eq:
      case PrimOp::Ne:
        node.type = t_bool();
        break;
      case PrimOp::Lt:
      case PrimOp::Le:
      case PrimOp::Gt:
      case PrimOp::Ge:
        if (t == PrimType::Bool) throw Error(ErrorCode::TypeMismatch, "ordering on bool", e.span);
        node.type = t_bool();
        break;
      default:
        if (t == PrimType::Bool)
          throw Error(ErrorCode::TypeMismatch,
                      "arithmetic operator '" + std::string(primop_name(x.op)) + "' on bool", e.span);
        node.type = t_prim(t);
    }
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::App& x) {
    node.rule = "App";
    auto [l, r] = split(node, ctx, e, free_vars(*x.fn), free_vars(*x.arg));
    node.children.push_back(check(l, *x.fn));
    node.children.push_back(check(r, *x.arg));
    const TypeRef& ft = node.children[0].type;
    const auto* fun = ft->as<TFun>();
    if (!fun) throw Error(ErrorCode::TypeMismatch, "applying a non-function of type " + type_to_string(ft), e.span);
    if (!type_equal(fun->arg, node.children[1].type)) mismatch(e, "function argument", fun->arg, node.children[1].type);
    node.type = fun->result;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Let& x) {
    node.rule = "Let";
    auto [l, r] = split(node, ctx, e, free_vars(*x.bound), minus(free_vars(*x.body), {x.name}));
    node.children.push_back(check(l, *x.bound));
    const TypeRef rho = node.children[0].type;
    node.children.push_back(check(extend(r, {{x.name, rho}}, e), *x.body));
    node.type = node.children[1].type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::LetBang& x) {
    node.rule = "LetBang";
    std::set<std::string> observed;
    std::vector<CtxBinding> originals;
    for (const auto& y : x.observed) {
      if (!observed.insert(y).second)
        throw Error(ErrorCode::DuplicateBinder, "variable '" + y + "' observed twice", e.span);
      const CtxBinding* b = ctx.find(y);
      if (!b) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + y + "'", e.span);
      originals.push_back(*b);
    }
    const TypeContext rest = ctx.without(observed);
    std::set<std::string> fv1 = free_vars(*x.bound);
    std::set<std::string> fv2 = minus(free_vars(*x.body), {x.name});
    for (const auto& y : observed) {
      fv1.erase(y);
      fv2.erase(y);
    }
    auto [l, r] = split(node, rest, e, fv1, fv2);

    std::vector<CtxBinding> banged;
    for (const auto& b : originals) banged.push_back({b.name, bang_type(b.type)});
    node.children.push_back(check(extend(l, banged, e), *x.bound));
    const TypeRef rho = node.children[0].type;
    if (!kind_check(delta_, *rho, Kind::escape()))
      throw Error(ErrorCode::EscapeViolation,
                  "let! result of type " + type_to_string(rho) + " may not escape (not of kind {E})", e.span);
    std::vector<CtxBinding> inner = originals;
    inner.push_back({x.name, rho});
    node.children.push_back(check(extend(r, inner, e), *x.body));
    node.type = node.children[1].type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::If& x) {
    node.rule = "If";
    auto [l, r] = split(node, ctx, e, free_vars(*x.cond),
                        unite(free_vars(*x.then_branch), free_vars(*x.else_branch)));
    node.children.push_back(check(l, *x.cond));
    if (!type_equal(*node.children[0].type, *t_bool())) mismatch(e, "if condition", t_bool(), node.children[0].type);
    node.children.push_back(check(r, *x.then_branch));
    node.children.push_back(check(r, *x.else_branch));
    if (!type_equal(node.children[1].type, node.children[2].type))
      mismatch(e, "if branches", node.children[1].type, node.children[2].type);
    node.type = node.children[1].type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Cast& x) {
    node.rule = "Cast";
    node.children.push_back(check(ctx, *x.operand));
    const PrimType from = expect_prim(*x.operand, node.children[0].type);
    if (!prim_size_le(from, x.target))
      throw Error(ErrorCode::TypeMismatch,
                  "cannot cast " + std::string(prim_name(from)) + " to narrower " +
                      std::string(prim_name(x.target)),
                  e.span);
    node.type = t_prim(x.target);
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Promote& x) {
    node.rule = "Prom";
    TypeRef target = t_variant(x.target);
    well_formed(target, e);
    node.children.push_back(check(ctx, *x.operand));
    const TVariant& from = expect_variant(*x.operand, node.children[0].type);
    const TVariant& to = *target->as<TVariant>();
    for (const auto& alt : from.alts) {
      const Alternative* t = find_alt(to, alt.ctor);
      if (!t)
        throw Error(ErrorCode::UnknownConstructor,
                    "constructor '" + alt.ctor + "' missing from promotion target", e.span);
      if (!type_equal(t->type, alt.type)) mismatch(e, "promoted alternative '" + alt.ctor + "'", t->type, alt.type);
    }
    node.type = std::move(target);
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Case& x) {
    node.rule = "Case";
    auto [l, r] = split(node, ctx, e, free_vars(*x.scrutinee),
                        unite(minus(free_vars(*x.match_body), {x.match_var}),
                              minus(free_vars(*x.else_body), {x.else_var})));
    node.children.push_back(check(l, *x.scrutinee));
    const TVariant& v = expect_variant(*x.scrutinee, node.children[0].type);
    const Alternative* alt = find_alt(v, x.ctor);
    if (!alt)
      throw Error(ErrorCode::UnknownConstructor,
                  "constructor '" + x.ctor + "' not in " + type_to_string(node.children[0].type), e.span);
    std::vector<Alternative> rest;
    for (const auto& a : v.alts)
      if (a.ctor != x.ctor) rest.push_back(a);
    const TypeRef payload = alt->type;
    node.children.push_back(check(extend(r, {{x.match_var, payload}}, e), *x.match_body));
    node.children.push_back(check(extend(r, {{x.else_var, t_variant(std::move(rest))}}, e), *x.else_body));
    if (!type_equal(node.children[1].type, node.children[2].type))
      mismatch(e, "case branches", node.children[1].type, node.children[2].type);
    node.type = node.children[1].type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Esac& x) {
    node.rule = "Esac";
    node.children.push_back(check(ctx, *x.operand));
    const TVariant& v = expect_variant(*x.operand, node.children[0].type);
    if (v.alts.size() != 1)
      throw Error(ErrorCode::NonTotalEsac,
                  "esac needs exactly one remaining alternative, found " + std::to_string(v.alts.size()),
                  e.span);
    node.type = v.alts[0].type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr&, const ex::Con& x) {
    node.rule = "Cons";
    node.children.push_back(check(ctx, *x.operand));
    node.type = t_variant({{x.ctor, node.children[0].type}});
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Struct& x) {
    node.rule = "Struct";
    std::vector<const Expr*> items;
    for (const auto& f : x.fields) items.push_back(f.second.get());
    const auto types = check_list(node, ctx, e, items);
    std::vector<FieldType> fields;
    for (std::size_t i = 0; i < types.size(); ++i) fields.push_back({x.fields[i].first, types[i], false});
    node.type = t_record(std::move(fields), Mode::Unboxed);
  }

  std::size_t field_index(const Expr& e, const TRecord& r, const TypeRef& rt, const std::string& f) {
    auto idx = find_field(r, f);
    if (!idx) throw Error(ErrorCode::UnknownField, "no field '" + f + "' in " + type_to_string(rt), e.span);
    return *idx;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Member& x) {
    node.rule = "Member";
    node.children.push_back(check(ctx, *x.record));
    const TypeRef& rt = node.children[0].type;
    const TRecord& r = expect_record(e, rt);
    const FieldType& f = r.fields[field_index(e, r, rt, x.field)];
    if (f.taken) throw Error(ErrorCode::TakenFieldRead, "field '" + x.field + "' is taken", e.span);
    if (!kind_check(delta_, *rt, Kind::share()))
      throw Error(ErrorCode::ShareViolation,
                  "member access needs a shareable record, found " + type_to_string(rt), e.span);
    node.type = f.type;
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Put& x) {
    auto [l, r] = split(node, ctx, e, free_vars(*x.record), free_vars(*x.value));
    node.children.push_back(check(l, *x.record));
    const TypeRef& rt = node.children[0].type;
    const TRecord& rec = expect_record(e, rt);
    if (rec.mode == Mode::ReadOnly)
      throw Error(ErrorCode::ReadOnlyWrite, "put into read-only record " + type_to_string(rt), e.span);
    const std::size_t k = field_index(e, rec, rt, x.field);
    const FieldType& f = rec.fields[k];
    if (f.taken) {
      node.rule = "Put1";
    } else if (kind_check(delta_, *f.type, Kind::discard())) {
      node.rule = "Put2";
    } else {
      throw Error(ErrorCode::DiscardViolation,
                  "put would overwrite present field '" + x.field + "' of non-discardable type " +
                      type_to_string(f.type),
                  e.span);
    }
    node.children.push_back(check(r, *x.value));
    if (!type_equal(f.type, node.children[1].type)) mismatch(e, "put value", f.type, node.children[1].type);
    std::vector<FieldType> fields = rec.fields;
    fields[k].taken = false;
    node.type = t_record(std::move(fields), rec.mode);
  }

  void rule(TypingTree& node, const TypeContext& ctx, const Expr& e, const ex::Take& x) {
    auto [l, r] = split(node, ctx, e, free_vars(*x.record),
                        minus(free_vars(*x.body), {x.record_var, x.field_var}));
    node.children.push_back(check(l, *x.record));
    const TypeRef& rt = node.children[0].type;
    const TRecord& rec = expect_record(e, rt);
    if (rec.mode == Mode::ReadOnly)
      throw Error(ErrorCode::ReadOnlyWrite, "take from read-only record " + type_to_string(rt), e.span);
    const std::size_t k = field_index(e, rec, rt, x.field);
    const FieldType& f = rec.fields[k];
    if (f.taken) throw Error(ErrorCode::TakenFieldRead, "field '" + x.field + "' is already taken", e.span);
    TypeRef remaining = rt;
    if (kind_check(delta_, *f.type, Kind::share())) {
      node.rule = "Take2";
    } else {
      node.rule = "Take1";
      std::vector<FieldType> fields = rec.fields;
      fields[k].taken = true;
      remaining = t_record(std::move(fields), rec.mode);
    }
    node.children.push_back(
        check(extend(r, {{x.record_var, remaining}, {x.field_var, f.type}}, e), *x.body));
    node.type = node.children[1].type;
  }

  void rule(TypingTree&, const TypeContext&, const Expr& e, const ex::Match&) {
    throw Error(ErrorCode::UnsupportedConstruct, "match must be desugared before type checking", e.span);
  }

  const Program& program_;
  const KindContext& delta_;
};

/// Finds one cycle in the call graph between function definitions.
std::vector<std::string> find_cycle(const Program& program) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& d : program.defs())
    if (const FunDef* f = d.fun()) {
      std::set<std::string> callees;
      collect_funrefs(*f->body, callees);
      for (const auto& c : callees)
        if (const Def* cd = program.find(c); cd && cd->fun()) edges[f->name].insert(c);
    }
  std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;
  std::function<bool(const std::string&)> dfs = [&](const std::string& n) {
    state[n] = 1;
    stack.push_back(n);
    for (const auto& m : edges[n]) {
      if (state[m] == 1) {
        auto it = std::find(stack.begin(), stack.end(), m);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[m] == 0 && dfs(m)) return true;
    }
    stack.pop_back();
    state[n] = 2;
    return false;
  };
  for (const auto& d : program.defs())
    if (d.fun() && state[d.name()] == 0 && dfs(d.name())) return cycle;
  return {};
}

}  // namespace

Checked check_expr(const Program& program, const KindContext& delta, const TypeContext& gamma,
                   const Expr& e, const std::optional<TypeRef>& expected) {
  Checker checker(program, delta);
  TypingTree tree = checker.check(gamma, e);
  if (expected && !type_equal(*expected, tree.type)) mismatch(e, "expression", *expected, tree.type);
  TypeRef t = tree.type;
  return {std::move(t), std::move(tree), nullptr};
}

ProgramCheck check_program(const Program& program) {
  ProgramCheck result;
  if (auto cycle = find_cycle(program); !cycle.empty()) {
    std::string path;
    for (const auto& n : cycle) path += n + " -> ";
    path += cycle.front();
    result.errors.emplace_back(ErrorCode::RecursionDetected, "recursion detected: " + path,
                               program.find(cycle.front())->span);
  }
  for (const auto& d : program.defs()) {
    const FunDef* f = d.fun();
    if (!f) continue;
    try {
      const KindContext delta(f->signature.binders);
      const TypeContext gamma({{f->param, f->signature.fun().arg}});
      Checked c = check_expr(program, delta, gamma, *f->body, f->signature.fun().result);
      result.trees.emplace(f->name, std::move(c.tree));
    } catch (const Error& err) {
      result.errors.push_back(err);
    }
  }
  return result;
}

void require_well_typed(const Program& program) {
  ProgramCheck pc = check_program(program);
  if (!pc.ok()) throw pc.errors.front();
}

Checked check_instance(const Program& program, const FunDef& def, const std::vector<TypeRef>& type_args) {
  const TypeSubst subst = make_subst(def.signature, type_args);
  const TypeRef fn = subst_type(def.signature.body, subst);
  const auto& f = *fn->as<TFun>();
  const TypeContext gamma({{def.param, f.arg}});
  ExprRef body = subst_expr(def.body, subst);
  Checked c = check_expr(program, KindContext{}, gamma, *body, f.result);
  c.body = std::move(body);
  return c;
}

nlohmann::json typing_tree_to_json(const TypingTree& tree) {
  nlohmann::json j;
  j["rule"] = tree.rule;
  j["span"] = {tree.span.start, tree.span.end};
  j["type"] = type_to_string(tree.type);
  nlohmann::json gamma = nlohmann::json::array();
  for (const auto& b : tree.gamma) {
    const bool weakened = std::find(tree.weakened.begin(), tree.weakened.end(), b.name) != tree.weakened.end();
    gamma.push_back({b.name, type_to_string(b.type), weakened ? "available" : "used"});
  }
  j["gamma"] = std::move(gamma);
  if (!tree.weakened.empty()) j["weakened"] = tree.weakened;
  if (!tree.splits.empty()) {
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& s : tree.splits)
      splits.push_back({{"left", s.left}, {"right", s.right}, {"shared", s.shared}});
    j["splits"] = std::move(splits);
  }
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : tree.children) children.push_back(typing_tree_to_json(c));
  j["children"] = std::move(children);
  return j;
}

void index_tree(const TypingTree& tree, TreeIndex& out) {
  out.emplace(tree.expr, &tree);
  for (const auto& c : tree.children) index_tree(c, out);
}

}  // namespace cogent
