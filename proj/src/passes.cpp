#include "cogent/passes.hpp"

#include <deque>
#include <functional>

#include "cogent/instance.hpp"
#include "cogent/kinding.hpp"

namespace cogent {

namespace {

using ChildFn = std::function<ExprRef(const ExprRef&)>;

/// Copies one node with `f` applied to each direct subexpression.
ExprRef map_children(const ExprRef& e, const ChildFn& f) {
  Expr::Node node = std::visit(
      [&](const auto& x) -> Expr::Node {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          std::vector<ExprRef> args;
          for (const auto& a : x.args) args.push_back(f(a));
          return ex::PrimOpE{x.op, std::move(args)};
        } else if constexpr (std::is_same_v<T, ex::App>) {
          auto fn = f(x.fn);
          return ex::App{fn, f(x.arg)};
        } else if constexpr (std::is_same_v<T, ex::Let>) {
          auto b = f(x.bound);
          return ex::Let{x.name, b, f(x.body)};
        } else if constexpr (std::is_same_v<T, ex::LetBang>) {
          auto b = f(x.bound);
          return ex::LetBang{x.observed, x.name, b, f(x.body)};
        } else if constexpr (std::is_same_v<T, ex::If>) {
          auto c = f(x.cond);
          auto t = f(x.then_branch);
          return ex::If{c, t, f(x.else_branch)};
        } else if constexpr (std::is_same_v<T, ex::Cast>) {
          return ex::Cast{x.target, f(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          return ex::Promote{x.target, f(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          auto s = f(x.scrutinee);
          auto m = f(x.match_body);
          return ex::Case{s, x.ctor, x.match_var, m, x.else_var, f(x.else_body)};
        } else if constexpr (std::is_same_v<T, ex::Esac>) {
          return ex::Esac{f(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Con>) {
          return ex::Con{x.ctor, f(x.operand)};
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          std::vector<std::pair<std::string, ExprRef>> fields;
          for (const auto& [n, fe] : x.fields) fields.emplace_back(n, f(fe));
          return ex::Struct{std::move(fields)};
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          return ex::Member{f(x.record), x.field};
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          auto r = f(x.record);
          return ex::Put{r, x.field, f(x.value)};
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          auto r = f(x.record);
          return ex::Take{x.record_var, x.field, x.field_var, r, f(x.body)};
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          auto s = f(x.scrutinee);
          std::vector<ex::MatchArm> arms;
          for (const auto& a : x.arms) arms.push_back({a.ctor, a.var, f(a.body)});
          return ex::Match{s, std::move(arms)};
        } else {
          return x;
        }
      },
      e->node);
  return make_expr(std::move(node), e->span);
}

std::set<std::string> program_names(const Program& p) {
  std::set<std::string> used;
  for (const auto& d : p.defs()) {
    used.insert(d.name());
    if (const FunDef* f = d.fun()) {
      used.insert(f->param);
      collect_names(*f->body, used);
    }
  }
  return used;
}

std::string fresh_prime(const std::string& base, std::set<std::string>& used) {
  std::string name = base + "'";
  while (used.count(name)) name += "'";
  used.insert(name);
  return name;
}

template <class F>
Program map_bodies(const Program& p, F f) {
  std::vector<Def> defs;
  for (const auto& d : p.defs()) {
    if (const FunDef* fd = d.fun()) {
      FunDef copy = *fd;
      copy.body = f(fd->body);
      defs.push_back(Def{std::move(copy), d.span});
    } else {
      defs.push_back(d);
    }
  }
  return Program(std::move(defs));
}

}  // namespace

// ---------------------------------------------------------------------------
// Match desugaring

ExprRef desugar_match(const ExprRef& e, std::set<std::string>& used) {
  const auto* m = e->as<ex::Match>();
  if (!m) return map_children(e, [&](const ExprRef& c) { return desugar_match(c, used); });
  if (m->arms.empty()) throw Error(ErrorCode::EmptyMatch, "match with no arms", e->span);
  std::set<std::string> seen;
  for (const auto& a : m->arms)
    if (!seen.insert(a.ctor).second)
      throw Error(ErrorCode::DuplicateArm, "constructor '" + a.ctor + "' matched twice", e->span);

  const ExprRef scrutinee = desugar_match(m->scrutinee, used);
  const std::string base = scrutinee->is<ex::Var>() ? scrutinee->as<ex::Var>()->name : "v";
  // Else-variables are named after the scrutinee with primes appended.
  std::vector<std::string> rest_names;
  for (std::size_t i = 0; i + 1 < m->arms.size(); ++i)
    rest_names.push_back(fresh_prime(i == 0 ? base : rest_names.back(), used));

  const ex::MatchArm& last = m->arms.back();
  const ExprRef last_scrutinee =
      m->arms.size() == 1 ? scrutinee : make_expr(ex::Var{rest_names.back()}, e->span);
  ExprRef acc = make_expr(ex::Let{last.var, make_expr(ex::Esac{last_scrutinee}, e->span), desugar_match(last.body, used)},
                          e->span);
  for (std::size_t i = m->arms.size() - 1; i-- > 0;) {
    const ex::MatchArm& arm = m->arms[i];
    const ExprRef s = i == 0 ? scrutinee : make_expr(ex::Var{rest_names[i - 1]}, e->span);
    acc = make_expr(ex::Case{s, arm.ctor, arm.var, desugar_match(arm.body, used), rest_names[i], acc}, e->span);
  }
  return acc;
}

Program desugar_program(const Program& program) {
  std::set<std::string> used = program_names(program);
  return map_bodies(program, [&](const ExprRef& b) { return desugar_match(b, used); });
}

// ---------------------------------------------------------------------------
// A-normalisation

namespace {

bool is_atom(const Expr& e) { return e.is<ex::Var>() || e.is<ex::Lit>() || e.is<ex::Unit>(); }

class Normaliser {
 public:
  explicit Normaliser(std::set<std::string> used) : used_(std::move(used)) {}

  ExprRef norm(const ExprRef& e) {
    using Binds = std::vector<std::pair<std::string, ExprRef>>;
    Binds binds;
    auto atom = [&](const ExprRef& c) -> ExprRef {
      ExprRef n = norm(c);
      if (is_atom(*n)) return n;
      std::string name = fresh();
      binds.emplace_back(name, n);
      return make_expr(ex::Var{name}, c->span);
    };
    ExprRef core = std::visit(
        [&](const auto& x) -> ExprRef {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ex::PrimOpE> || std::is_same_v<T, ex::App> ||
                        std::is_same_v<T, ex::Cast> || std::is_same_v<T, ex::Promote> ||
                        std::is_same_v<T, ex::Esac> || std::is_same_v<T, ex::Con> ||
                        std::is_same_v<T, ex::Struct> || std::is_same_v<T, ex::Member> ||
                        std::is_same_v<T, ex::Put>) {
            return map_children(e, atom);
          } else if constexpr (std::is_same_v<T, ex::Let>) {
            return make_expr(ex::Let{x.name, norm(x.bound), norm(x.body)}, e->span);
          } else if constexpr (std::is_same_v<T, ex::LetBang>) {
            return make_expr(ex::LetBang{x.observed, x.name, norm(x.bound), norm(x.body)}, e->span);
          } else if constexpr (std::is_same_v<T, ex::If>) {
            ExprRef c = atom(x.cond);
            return make_expr(ex::If{c, norm(x.then_branch), norm(x.else_branch)}, e->span);
          } else if constexpr (std::is_same_v<T, ex::Case>) {
            ExprRef s = atom(x.scrutinee);
            return make_expr(ex::Case{s, x.ctor, x.match_var, norm(x.match_body), x.else_var, norm(x.else_body)},
                             e->span);
          } else if constexpr (std::is_same_v<T, ex::Take>) {
            ExprRef r = atom(x.record);
            return make_expr(ex::Take{x.record_var, x.field, x.field_var, r, norm(x.body)}, e->span);
          } else if constexpr (std::is_same_v<T, ex::Match>) {
            throw Error(ErrorCode::UnsupportedConstruct, "match must be desugared before normalisation", e->span);
          } else {
            return e;
          }
        },
        e->node);
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      core = make_expr(ex::Let{it->first, it->second, core}, it->second->span);
    return core;
  }

 private:
  std::string fresh() {
    std::string name;
    do name = "t" + std::to_string(counter_++);
    while (used_.count(name));
    used_.insert(name);
    return name;
  }

  std::set<std::string> used_;
  std::uint64_t counter_ = 0;
};

bool operands_atomic(const Expr& e) {
  bool ok = true;
  auto need = [&](const ExprRef& c) { ok = ok && is_atom(*c); };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          for (const auto& a : x.args) need(a);
        } else if constexpr (std::is_same_v<T, ex::App>) {
          need(x.fn);
          need(x.arg);
        } else if constexpr (std::is_same_v<T, ex::Cast> || std::is_same_v<T, ex::Promote> ||
                             std::is_same_v<T, ex::Esac> || std::is_same_v<T, ex::Con>) {
          need(x.operand);
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          for (const auto& f : x.fields) need(f.second);
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          need(x.record);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          need(x.record);
          need(x.value);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          need(x.cond);
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          need(x.scrutinee);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          need(x.record);
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          ok = false;
        }
      },
      e.node);
  return ok;
}

}  // namespace

bool is_anf(const Expr& e) {
  if (!operands_atomic(e)) return false;
  bool ok = true;
  map_children(std::make_shared<const Expr>(e), [&](const ExprRef& c) {
    ok = ok && is_anf(*c);
    return c;
  });
  return ok;
}

Program a_normalise(const Program& program) {
  Normaliser n(program_names(program));
  return map_bodies(program, [&](const ExprRef& b) { return n.norm(b); });
}

// ---------------------------------------------------------------------------
// Monomorphisation

void RenameMap::add(RenameEntry entry) {
  const std::string key = instance_key(entry.from, entry.args);
  if (by_key_.count(key)) throw Error(ErrorCode::InvalidValue, "instance '" + key + "' renamed twice");
  if (!targets_.insert(entry.to).second)
    throw Error(ErrorCode::InvalidValue, "rename target '" + entry.to + "' used twice");
  by_key_.emplace(key, entries_.size());
  entries_.push_back(std::move(entry));
}

const std::string* RenameMap::find(const std::string& name, const std::vector<TypeRef>& args) const {
  auto it = by_key_.find(instance_key(name, args));
  return it == by_key_.end() ? nullptr : &entries_[it->second].to;
}

const std::string& RenameMap::lookup(const std::string& name, const std::vector<TypeRef>& args) const {
  if (const std::string* s = find(name, args)) return *s;
  std::string shown = name;
  for (const auto& a : args) shown += " " + type_to_string(a);
  throw Error(ErrorCode::MissingRenameEntry, "no monomorphic name for '" + shown + "'");
}

nlohmann::json RenameMap::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json args = nlohmann::json::array();
    for (const auto& a : e.args) args.push_back(type_to_string(a));
    out.push_back({{"from", e.from}, {"args", std::move(args)}, {"to", e.to}});
  }
  return out;
}

ExprRef mono_expr(const RenameMap& renames, const ExprRef& e) {
  if (const auto* f = e->as<ex::FunRef>())
    return make_expr(ex::FunRef{renames.lookup(f->name, f->type_args), {}}, e->span);
  return map_children(e, [&](const ExprRef& c) { return mono_expr(renames, c); });
}

Value mono_val(const RenameMap& renames, const Value& v) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Value::Fun>) {
          return Value::Fun{renames.lookup(x.name, x.type_args), {}, x.param, mono_expr(renames, x.body)};
        } else if constexpr (std::is_same_v<T, Value::AbsFun>) {
          return Value::AbsFun{renames.lookup(x.name, x.type_args), {}};
        } else if constexpr (std::is_same_v<T, Value::Con>) {
          return v_con(x.ctor, mono_val(renames, *x.payload));
        } else if constexpr (std::is_same_v<T, Value::Record>) {
          std::vector<std::pair<std::string, Value>> fields;
          for (const auto& [n, fv] : x.fields) fields.emplace_back(n, mono_val(renames, fv));
          return v_record(std::move(fields));
        } else if constexpr (std::is_same_v<T, Value::Abstract>) {
          Value::Abstract a{x.tag, {}};
          for (const auto& i : x.items) a.items.push_back(mono_val(renames, i));
          return a;
        } else {
          return x;
        }
      },
      v.node);
}

MonoResult monomorphise(const Program& program, const std::vector<std::string>& entries) {
  std::vector<std::string> roots = entries;
  if (roots.empty()) {
    for (const auto& d : program.defs())
      if (d.fun() && d.signature().binders.empty()) roots.push_back(d.name());
  } else {
    for (const auto& r : roots) {
      const Def* d = program.find(r);
      if (!d) throw Error(ErrorCode::NoEntryPoint, "entry point '" + r + "' is not defined");
      if (!d->signature().binders.empty())
        throw Error(ErrorCode::NoEntryPoint, "entry point '" + r + "' is polymorphic", d->span);
    }
  }
  if (roots.empty()) throw Error(ErrorCode::NoEntryPoint, "program has no monomorphic function to start from");

  std::set<std::string> used = program_names(program);
  std::map<std::string, std::uint64_t> counters;
  RenameMap renames;
  std::deque<std::pair<std::string, std::vector<TypeRef>>> work;

  auto request = [&](const std::string& name, const std::vector<TypeRef>& args, Span span) {
    if (renames.find(name, args)) return;
    for (const auto& a : args)
      if (!is_ground(*a))
        throw Error(ErrorCode::UnresolvedInstantiation,
                    "reference to '" + name + "' at non-ground type " + type_to_string(a), span);
    if (!program.find(name)) throw Error(ErrorCode::UnknownFunction, "unknown function '" + name + "'", span);
    std::string to;
    do to = name + "_" + std::to_string(counters[name]++);
    while (used.count(to));
    used.insert(to);
    renames.add({name, args, to});
    work.emplace_back(name, args);
  };
  for (const auto& r : roots) request(r, {}, program.find(r)->span);

  std::vector<Def> out;
  while (!work.empty()) {
    auto [name, args] = work.front();
    work.pop_front();
    const Def* d = program.find(name);
    const TypeSubst subst = make_subst(d->signature(), args, d->span);
    const PolyType sig{{}, subst_type(d->signature().body, subst)};
    const std::string to = *renames.find(name, args);
    if (const FunDef* f = d->fun()) {
      ExprRef body = subst_expr(f->body, subst);
      std::function<void(const Expr&)> scan = [&](const Expr& e) {
        if (const auto* r = e.as<ex::FunRef>()) request(r->name, r->type_args, e.span);
        map_children(std::make_shared<const Expr>(e), [&](const ExprRef& c) {
          scan(*c);
          return c;
        });
      };
      scan(*body);
      out.push_back(Def{FunDef{to, sig, f->param, mono_expr(renames, body)}, d->span});
    } else {
      const AbsFunDecl& a = *d->abs();
      AbsInstance origin = a.instance_of ? *a.instance_of : AbsInstance{name, args};
      out.push_back(Def{AbsFunDecl{to, sig, std::move(origin)}, d->span});
    }
  }
  return {Program(std::move(out)), std::move(renames)};
}

}  // namespace cogent
