#include "cogent/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>

#include "cogent/kinding.hpp"

namespace cogent {

// ---------------------------------------------------------------------------
// Input generation

ValueGenerator::ValueGenerator(const Program& program, const Registry& registry, Instantiator& inst,
                               std::uint64_t seed)
    : program_(program), registry_(registry), inst_(inst), rng_(seed) {}

std::optional<Value> ValueGenerator::generate(const TypeRef& t) {
  failed_ = false;
  Value v = gen(t);
  if (failed_) return std::nullopt;
  return v;
}

Value ValueGenerator::gen(const TypeRef& t) {
  return std::visit(
      [&](const auto& ty) -> Value {
        using T = std::decay_t<decltype(ty)>;
        if constexpr (std::is_same_v<T, TPrim>) {
          const std::uint64_t max = prim_max_literal(ty.prim);
          const int mode = std::uniform_int_distribution<int>(0, 3)(rng_);
          std::uint64_t n = 0;
          if (mode <= 1) n = std::uniform_int_distribution<std::uint64_t>(0, std::min<std::uint64_t>(max, 10))(rng_);
          else if (mode == 2) n = max - std::uniform_int_distribution<std::uint64_t>(0, std::min<std::uint64_t>(max, 3))(rng_);
          else n = std::uniform_int_distribution<std::uint64_t>(0, max)(rng_);
          return v_lit(n, ty.prim);
        } else if constexpr (std::is_same_v<T, TUnit>) {
          return v_unit();
        } else if constexpr (std::is_same_v<T, TVariant>) {
          if (ty.alts.empty()) {
            failed_ = true;
            return v_unit();
          }
          const auto& alt = ty.alts[std::uniform_int_distribution<std::size_t>(0, ty.alts.size() - 1)(rng_)];
          return v_con(alt.ctor, gen(alt.type));
        } else if constexpr (std::is_same_v<T, TRecord>) {
          std::vector<std::pair<std::string, Value>> fields;
          for (const auto& f : ty.fields) fields.emplace_back(f.name, f.taken ? v_unit() : gen(f.type));
          return v_record(std::move(fields));
        } else if constexpr (std::is_same_v<T, TAbstract>) {
          const AbstractTypeSpec* spec = registry_.find_type(ty.name);
          if (!spec || !spec->generate) {
            failed_ = true;
            return v_unit();
          }
          return spec->generate(ty.args, rng_, [this](const TypeRef& et) { return gen(et); });
        } else if constexpr (std::is_same_v<T, TFun>) {
          std::vector<std::string> candidates;
          for (const auto& d : program_.defs())
            if (d.signature().binders.empty() && type_equal(d.signature().body, t)) candidates.push_back(d.name());
          if (candidates.empty()) {
            failed_ = true;
            return v_unit();
          }
          const auto& name = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
          return inst_.function_value(name, {});
        } else {
          failed_ = true;
          return v_unit();
        }
      },
      t->node);
}

Value lift_value(const Value& v, const TypeRef& t, Store& store, const Registry& registry) {
  if (const auto* r = t->as<TRecord>()) {
    const auto* rv = v.as<Value::Record>();
    if (!rv) throw Error(ErrorCode::InvalidValue, "expected a record for " + type_to_string(t));
    std::vector<std::pair<std::string, Value>> fields;
    for (std::size_t i = 0; i < r->fields.size() && i < rv->fields.size(); ++i) {
      const FieldType& f = r->fields[i];
      fields.emplace_back(f.name, f.taken ? v_unit() : lift_value(rv->fields[i].second, f.type, store, registry));
    }
    Value rec = v_record(std::move(fields));
    if (r->mode == Mode::Unboxed) return rec;
    return v_ptr(store.alloc(std::move(rec)));
  }
  if (const auto* vt = t->as<TVariant>()) {
    const auto* c = v.as<Value::Con>();
    const Alternative* alt = c ? find_alt(*vt, c->ctor) : nullptr;
    if (!alt) throw Error(ErrorCode::InvalidValue, "expected a variant value for " + type_to_string(t));
    return v_con(c->ctor, lift_value(*c->payload, alt->type, store, registry));
  }
  if (const auto* a = t->as<TAbstract>()) {
    Value inner = v;
    if (auto* av = inner.as<Value::Abstract>(); av && a->args.size() == 1)
      for (auto& item : av->items) item = lift_value(item, a->args[0], store, registry);
    if (a->mode == Mode::Unboxed) return inner;
    return v_ptr(store.alloc(std::move(inner)));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Traces

namespace {

struct TraceNode {
  bool ffi = false;
  const Expr* expr = nullptr;
  Env env;
  std::string ffi_name;
  std::vector<TypeRef> targs;
  Value arg;
  std::shared_ptr<const Store> before;
  std::shared_ptr<const Store> after;
  std::optional<Value> result;
  std::vector<std::unique_ptr<TraceNode>> children;
};

class TreeTracer : public Tracer {
 public:
  std::vector<std::unique_ptr<TraceNode>> roots;

  void enter(const Expr& e, const Env& env, const Store* store) override {
    auto n = std::make_unique<TraceNode>();
    n->expr = &e;
    n->env = env;
    if (store) n->before = std::make_shared<const Store>(*store);
    push(std::move(n));
  }
  void leave(const Value& result, const Store* store) override { pop(result, store); }
  void enter_ffi(const std::string& name, const std::vector<TypeRef>& targs, const Value& arg,
                 const Store* store) override {
    auto n = std::make_unique<TraceNode>();
    n->ffi = true;
    n->ffi_name = name;
    n->targs = targs;
    n->arg = arg;
    if (store) n->before = std::make_shared<const Store>(*store);
    push(std::move(n));
  }
  void leave_ffi(const Value& result, const Store* store) override { pop(result, store); }

 private:
  void push(std::unique_ptr<TraceNode> n) {
    TraceNode* raw = n.get();
    (stack_.empty() ? roots : stack_.back()->children).push_back(std::move(n));
    stack_.push_back(raw);
  }
  void pop(const Value& result, const Store* store) {
    stack_.back()->result = result;
    if (store) stack_.back()->after = std::make_shared<const Store>(*store);
    stack_.pop_back();
  }
  std::vector<TraceNode*> stack_;
};

struct Fail {
  OracleFailure failure;
};

nlohmann::json sets_json(const PtrSets& s) {
  return {{"r", ptr_set_json(s.ro)}, {"w", ptr_set_json(s.rw)}};
}

nlohmann::json report_json(const CorrReport& r) {
  nlohmann::json j = sets_json(r.sets);
  j["ok"] = r.ok;
  if (r.failure) j["failure"] = corr_failure_json(*r.failure);
  return j;
}

/// Points function values at bodies owned by `inst`, so every evaluated node
/// has a derivation.
Value rebind(const Value& v, Instantiator& inst) {
  if (const auto* f = v.as<Value::Fun>()) return inst.function_value(f->name, f->type_args);
  if (const auto* c = v.as<Value::Con>()) return v_con(c->ctor, rebind(*c->payload, inst));
  if (v.is<Value::Record>()) {
    Value out = v;
    for (auto& f : out.as<Value::Record>()->fields) f.second = rebind(f.second, inst);
    return out;
  }
  if (v.is<Value::Abstract>()) {
    Value out = v;
    for (auto& item : out.as<Value::Abstract>()->items) item = rebind(item, inst);
    return out;
  }
  return v;
}

bool same_sets(const PtrSets& a, const PtrSets& b) { return a.ro == b.ro && a.rw == b.rw; }

std::vector<CtxBinding> pick(const std::vector<CtxBinding>& gamma, const std::vector<std::string>& names) {
  std::vector<CtxBinding> out;
  for (const auto& b : gamma)
    if (std::find(names.begin(), names.end(), b.name) != names.end()) out.push_back(b);
  return out;
}

class Replay {
 public:
  Replay(const Program& program, const Registry& registry, Instantiator& inst, Relator& rel, OracleStats& stats)
      : program_(program), registry_(registry), inst_(inst), rel_(rel), stats_(stats) {}

  /// Correspondence of one value, cross-checked against both one-sided typings.
  CorrReport corr(const Value& u, const Store& s, const Value& v, const TypeRef& t, const char* where) {
    CorrReport r = rel_.corr_value(u, s, v, t);
    CorrReport tu = rel_.value_typing_u(u, s, t);
    std::string why;
    const bool tv = rel_.value_typing_v(v, t, &why);
    erasure(r, tu, tv, where, {{"u", value_to_json(u)}, {"v", value_to_json(v)}, {"type", type_to_string(t)}});
    return r;
  }

  CorrReport corr_env(const Env& u, const Store& s, const Env& v, const std::vector<CtxBinding>& gamma,
                      const char* where) {
    CorrReport r = rel_.corr_env(u, s, v, gamma);
    CorrReport tu = rel_.env_typing_u(u, s, gamma);
    const bool tv = rel_.env_typing_v(v, gamma);
    nlohmann::json ctx = nlohmann::json::array();
    for (const auto& b : gamma) ctx.push_back({b.name, type_to_string(b.type)});
    erasure(r, tu, tv, where, {{"gamma", ctx}});
    return r;
  }

  void walk(const TraceNode& u, const TraceNode& v) {
    if (u.ffi != v.ffi || u.expr != v.expr || u.ffi_name != v.ffi_name || u.children.size() != v.children.size() ||
        u.result.has_value() != v.result.has_value())
      fail("trace", "TraceMismatch", "the two semantics took different evaluation paths", node_context(u));
    if (!u.ffi) ensure_indexed(u.expr);
    for (std::size_t i = 0; i < u.children.size(); ++i) walk(*u.children[i], *v.children[i]);
    if (!u.result) return;
    ++stats_.nodes;
    if (u.ffi) check_ffi(u, v);
    else check_expr_node(u, v);
  }

 private:
  [[noreturn]] void fail(std::string obligation, std::string kind, std::string detail, nlohmann::json context) {
    throw Fail{OracleFailure{std::move(obligation), std::move(kind), std::move(detail), std::move(context)}};
  }

  [[noreturn]] void fail_report(const char* obligation, const CorrReport& r, nlohmann::json context) {
    context["report"] = report_json(r);
    fail(obligation, r.failure->kind, r.failure->reason + " at " + r.failure->path + " (" + r.failure->rule + ")",
         std::move(context));
  }

  void erasure(const CorrReport& r, const CorrReport& tu, bool tv, const char* where, nlohmann::json context) {
    ++stats_.erasure;
    bool coherent = true;
    if (r.ok) coherent = tu.ok && tv && same_sets(tu.sets, r.sets);
    else if (r.failure->kind != "ValueMismatch") coherent = !(tu.ok && tv);
    if (!coherent) {
      context["where"] = where;
      context["corr"] = report_json(r);
      context["typing_u"] = report_json(tu);
      context["typing_v"] = tv;
      fail("erasure", "ErasureMismatch", "one-sided typings disagree with the correspondence", std::move(context));
    }
  }

  nlohmann::json node_context(const TraceNode& n) {
    nlohmann::json j;
    if (n.ffi) {
      j["ffi"] = n.ffi_name;
    } else {
      j["span"] = {n.expr->span.start, n.expr->span.end};
      if (auto it = index_.find(n.expr); it != index_.end()) j["rule"] = it->second->rule;
      if (const Instance* in = inst_.by_body(n.expr)) j["function"] = in->name;
    }
    return j;
  }

  void ensure_indexed(const Expr* e) {
    if (index_.count(e)) return;
    const Instance* in = inst_.by_body(e);
    if (!in) return;
    try {
      Checked c = check_expr(program_, KindContext{}, TypeContext({{in->param, in->param_type}}), *in->body,
                             in->result_type);
      checked_.push_back(std::move(c.tree));
      index_tree(checked_.back(), index_);
    } catch (const Error& err) {
      fail("theorem", std::string(error_code_name(err.code())), std::string("instance body of '") + in->name +
                                                      "' does not type-check: " + err.what(), {});
    }
  }

  void check_ffi(const TraceNode& u, const TraceNode& v) {
    ++stats_.ffi;
    const AbstractFnSpec& spec = registry_.lookup_fn(u.ffi_name);
    const TypeRef fn = subst_type(spec.signature.body, make_subst(spec.signature, u.targs));
    const TFun& f = *fn->as<TFun>();
    nlohmann::json ctx = {{"ffi", u.ffi_name}, {"arg_u", value_to_json(u.arg)}, {"arg_v", value_to_json(v.arg)}};
    CorrReport pre = corr(u.arg, *u.before, v.arg, f.arg, "ffi input");
    if (!pre.ok) fail_report("ffi-assumption", pre, ctx);
    ctx["result_u"] = value_to_json(*u.result);
    ctx["result_v"] = value_to_json(*v.result);
    CorrReport post = corr(*u.result, *u.after, *v.result, f.result, "ffi output");
    if (!post.ok) fail_report("ffi-assumption", post, ctx);
    if (!subset(post.sets.ro, pre.sets.ro))
      fail("ffi-assumption", "ReadSetGrew", "result read-only pointers are not among the argument's", ctx);
    auto frame = frame_check(pre.sets.rw, *u.before, post.sets.rw, *u.after);
    if (!frame.empty()) {
      ctx["frame_violations"] = frame_violations_json(frame);
      fail("ffi-assumption", frame.front().kind,
           "pointer " + std::to_string(frame.front().ptr) + " violates " + frame.front().kind, ctx);
    }
  }

  void check_expr_node(const TraceNode& u, const TraceNode& v) {
    auto it = index_.find(u.expr);
    if (it == index_.end()) fail("trace", "MissingDerivation", "no typing judgement for evaluated node", node_context(u));
    const TypingTree& t = *it->second;
    const Store& before = *u.before;
    const Store& after = *u.after;
    nlohmann::json ctx = node_context(u);

    ++stats_.theorem;
    CorrReport pre = corr_env(u.env, before, v.env, t.gamma, "node context");
    if (!pre.ok) fail_report("theorem", pre, ctx);

    if (!t.weakened.empty()) {
      ++stats_.weakening;
      std::vector<CtxBinding> kept;
      for (const auto& b : t.gamma)
        if (std::find(t.weakened.begin(), t.weakened.end(), b.name) == t.weakened.end()) kept.push_back(b);
      CorrReport k = corr_env(u.env, before, v.env, kept, "weakened context");
      if (!k.ok) fail_report("weakening", k, ctx);
      if (!subset(k.sets.ro, pre.sets.ro) || !subset(k.sets.rw, pre.sets.rw))
        fail("weakening", "SetGrew", "weakened context has pointers the full context lacks", ctx);
    }

    for (const auto& s : t.splits) {
      ++stats_.splitting;
      std::vector<std::string> both = s.left;
      both.insert(both.end(), s.right.begin(), s.right.end());
      CorrReport c1 = corr_env(u.env, before, v.env, pick(t.gamma, s.left), "split left");
      CorrReport c2 = corr_env(u.env, before, v.env, pick(t.gamma, s.right), "split right");
      CorrReport c = corr_env(u.env, before, v.env, pick(t.gamma, both), "split whole");
      if (!c1.ok) fail_report("splitting", c1, ctx);
      if (!c2.ok) fail_report("splitting", c2, ctx);
      if (!c.ok) fail_report("splitting", c, ctx);
      if (!disjoint(c1.sets.rw, c2.sets.rw))
        fail("splitting", "AliasViolation", "both halves of a split reach the same writable pointer", ctx);
      if (c.sets.ro != set_union(c1.sets.ro, c2.sets.ro) || c.sets.rw != set_union(c1.sets.rw, c2.sets.rw))
        fail("splitting", "SetMismatch", "split sets do not union to the whole", ctx);
    }

    if (!t.splits.empty() && !u.children.empty() && !t.children.empty() && u.children[0]->expr == t.children[0].expr &&
        u.children[0]->result) {
      ++stats_.unrelated;
      const TraceNode& first_u = *u.children[0];
      const TraceNode& first_v = *v.children[0];
      const auto rest = pick(t.gamma, t.splits.front().right);
      CorrReport c2 = corr_env(u.env, before, v.env, rest, "later context before");
      CorrReport r1 = corr(*first_u.result, *first_u.after, *first_v.result, t.children[0].type, "first premise");
      CorrReport c2_after = corr_env(u.env, *first_u.after, v.env, rest, "later context after");
      if (!c2_after.ok) fail_report("unrelated-updates", c2_after, ctx);
      if (!same_sets(c2.sets, c2_after.sets))
        fail("unrelated-updates", "SetMismatch", "later context changed across the first premise", ctx);
      if (r1.ok && !disjoint(c2.sets.rw, r1.sets.rw))
        fail("unrelated-updates", "AliasViolation", "first premise result aliases the later context", ctx);
    }

    if (const auto* lb = u.expr->as<ex::LetBang>()) {
      for (const auto& y : lb->observed) {
        ++stats_.bang;
        const CtxBinding* b = nullptr;
        for (const auto& g : t.gamma)
          if (g.name == y) b = &g;
        const Value* uy = u.env.lookup(y);
        const Value* vy = v.env.lookup(y);
        if (!b || !uy || !vy) fail("bang", "MissingBinding", "observed variable '" + y + "' is unbound", ctx);
        CorrReport c = corr(*uy, before, *vy, b->type, "observed");
        CorrReport cb = corr(*uy, before, *vy, bang_type(b->type), "observed at bang");
        if (!c.ok) fail_report("bang", c, ctx);
        if (!cb.ok) fail_report("bang", cb, ctx);
        if (cb.sets.ro != set_union(c.sets.ro, c.sets.rw) || !cb.sets.rw.empty())
          fail("bang", "SetMismatch", "bang of '" + y + "' is not (r u w, {})", ctx);
      }
    }

    CorrReport post = corr(*u.result, after, *v.result, t.type, "node result");
    if (!post.ok) {
      ctx["result_u"] = value_to_json(*u.result);
      ctx["result_v"] = value_to_json(*v.result);
      fail_report("theorem", post, ctx);
    }
    if (!subset(post.sets.ro, pre.sets.ro))
      fail("theorem", "ReadSetGrew", "result read-only pointers are not in the context's", ctx);
    auto frame = frame_check(pre.sets.rw, before, post.sets.rw, after);
    if (!frame.empty()) {
      ctx["frame_violations"] = frame_violations_json(frame);
      fail("theorem", frame.front().kind,
           "pointer " + std::to_string(frame.front().ptr) + " violates " + frame.front().kind, ctx);
    }
  }

  const Program& program_;
  const Registry& registry_;
  Instantiator& inst_;
  Relator& rel_;
  OracleStats& stats_;
  std::deque<TypingTree> checked_;
  TreeIndex index_;
};

}  // namespace

nlohmann::json OracleVerdict::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["r"] = ptr_set_json(in.ro);
  j["w"] = ptr_set_json(in.rw);
  j["r_out"] = ptr_set_json(out.ro);
  j["w_out"] = ptr_set_json(out.rw);
  j["frame_violations"] = frame_violations_json(frame);
  if (failure) {
    j["failure"] = {{"obligation", failure->obligation},
                    {"kind", failure->kind},
                    {"detail", failure->detail},
                    {"context", failure->context}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

OracleVerdict refinement_oracle(const Program& program, const Registry& registry, const std::string& fname,
                                const std::vector<TypeRef>& type_args, const Value& v_arg_in, const Value& u_arg_in,
                                const Store& store_in, OracleOptions opts) {
  OracleVerdict verdict;
  Instantiator inst(program);
  Relator rel(program, registry);
  Replay replay(program, registry, inst, rel, verdict.stats);
  const Value v_arg = rebind(v_arg_in, inst);
  const Value u_arg = rebind(u_arg_in, inst);
  Store store;
  for (const auto& [p, cell] : store_in.cells()) store.set(p, rebind(cell, inst));
  try {
    const Instance& entry = inst.get(fname, type_args);
    CorrReport pre = replay.corr(u_arg, store, v_arg, entry.param_type, "input");
    if (!pre.ok)
      throw Fail{OracleFailure{"input", pre.failure->kind,
                               pre.failure->reason + " at " + pre.failure->path + " (" + pre.failure->rule + ")",
                               report_json(pre)}};
    verdict.in = pre.sets;

    TreeTracer tu;
    TreeTracer tv;
    Store s = store;
    std::optional<Error> u_err;
    std::optional<Error> v_err;
    try {
      UpdateInterpreter ui(program, registry, inst, EvalOptions{opts.fuel, opts.replay ? &tu : nullptr});
      verdict.u_result = ui.apply_fn(fname, type_args, u_arg, s);
    } catch (const Error& e) {
      u_err = e;
    }
    try {
      ValueInterpreter vi(program, registry, inst, EvalOptions{opts.fuel, opts.replay ? &tv : nullptr});
      verdict.v_result = vi.apply_fn(fname, type_args, v_arg);
    } catch (const Error& e) {
      v_err = e;
    }
    verdict.store_out = s;
    if (u_err || v_err) {
      const bool same = u_err && v_err && u_err->code() == v_err->code();
      if (!same || u_err->code() != ErrorCode::DivisionByZero) {
        nlohmann::json ctx;
        if (u_err) ctx["update"] = std::string(error_code_name(u_err->code())) + ": " + u_err->what();
        if (v_err) ctx["value"] = std::string(error_code_name(v_err->code())) + ": " + v_err->what();
        throw Fail{OracleFailure{"evaluation", std::string(u_err ? error_code_name(u_err->code()) : error_code_name(v_err->code())),
                                 "evaluation did not terminate normally in both semantics", ctx}};
      }
      verdict.both_raised = std::string(error_code_name(u_err->code()));
    }

    if (opts.replay) {
      if (tu.roots.size() != tv.roots.size())
        throw Fail{OracleFailure{"trace", "TraceMismatch", "different number of top-level evaluations", {}}};
      for (std::size_t i = 0; i < tu.roots.size(); ++i) replay.walk(*tu.roots[i], *tv.roots[i]);
    }

    if (!verdict.both_raised) {
      CorrReport post = replay.corr(*verdict.u_result, s, *verdict.v_result, entry.result_type, "output");
      if (!post.ok)
        throw Fail{OracleFailure{"output", post.failure->kind,
                                 post.failure->reason + " at " + post.failure->path + " (" + post.failure->rule + ")",
                                 {{"result_u", value_to_json(*verdict.u_result)},
                                  {"result_v", value_to_json(*verdict.v_result)},
                                  {"store", store_to_json(s)}}}};
      verdict.out = post.sets;
      if (!subset(post.sets.ro, pre.sets.ro))
        throw Fail{OracleFailure{"output", "ReadSetGrew", "result read-only pointers are not among the input's", {}}};
      verdict.frame = frame_check(pre.sets.rw, store, post.sets.rw, s);
      if (!verdict.frame.empty())
        throw Fail{OracleFailure{"frame", verdict.frame.front().kind,
                                 "pointer " + std::to_string(verdict.frame.front().ptr) + " violates " +
                                     verdict.frame.front().kind,
                                 frame_violations_json(verdict.frame)}};
    }
    verdict.pass = true;
  } catch (const Fail& f) {
    verdict.pass = false;
    verdict.failure = f.failure;
  } catch (const Error& e) {
    verdict.pass = false;
    verdict.failure = OracleFailure{"evaluation", std::string(error_code_name(e.code())), e.what(), {}};
  }
  return verdict;
}

std::vector<OracleVerdict> random_oracle_runs(const Program& program, const Registry& registry,
                                              const std::string& fname, std::size_t count, std::uint64_t seed,
                                              OracleOptions opts) {
  std::vector<OracleVerdict> out(count);
  // Run i draws its input from its own stream, so results do not depend on `jobs`.
  auto run = [&](std::size_t i) {
    Instantiator inst(program);
    const Instance& entry = inst.get(fname, {});
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    const std::uint64_t run_seed = (std::uint64_t{words[0]} << 32) | words[1];
    ValueGenerator gen(program, registry, inst, run_seed);
    auto v = gen.generate(entry.param_type);
    if (!v) {
      out[i].failure = OracleFailure{"input", "NoInhabitant",
                                     "cannot generate a value of type " + type_to_string(entry.param_type), {}};
      return;
    }
    Store store;
    Value u = lift_value(*v, entry.param_type, store, registry);
    out[i] = refinement_oracle(program, registry, fname, {}, *v, u, store, opts);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          run(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace cogent
