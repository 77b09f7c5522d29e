#include "cogent/codegen.hpp"

#include <algorithm>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cogent/eval.hpp"
#include "cogent/ffi.hpp"
#include "cogent/oracle.hpp"
#include "cogent/passes.hpp"
#include "cogent/typecheck.hpp"

namespace cogent {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCKeywords = {
    "auto",     "break",    "case",     "char",   "const",    "continue", "default",  "do",
    "double",   "else",     "enum",     "extern", "float",    "for",      "goto",     "if",
    "inline",   "int",      "long",     "register", "restrict", "return", "short",    "signed",
    "sizeof",   "static",   "struct",   "switch", "typedef",  "union",    "unsigned", "void",
    "volatile", "while",    "bool",     "true",   "false",    "u",        "tag"};

/// Injective: `_` becomes `__` and `'` becomes `_q`.
std::string escape(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '_') out += "__";
    else if (c == '\'') out += "_q";
    else out += c;
  }
  return out;
}

/// Field and constructor names; keywords get a single trailing underscore,
/// which escaping never produces.
std::string member(const std::string& name) {
  std::string e = escape(name);
  return kCKeywords.count(e) ? e + "_" : e;
}

std::string fn_name(const std::string& name) { return "cf_" + escape(name); }
std::string tag_name(const std::string& ctor) { return "CG_TAG_" + escape(ctor); }

const char* prim_ctype(PrimType p) {
  switch (p) {
    case PrimType::U8: return "uint8_t";
    case PrimType::U16: return "uint16_t";
    case PrimType::U32: return "uint32_t";
    case PrimType::U64: return "uint64_t";
    case PrimType::Bool: return "bool";
  }
  return "uint64_t";
}

std::string c_literal(std::uint64_t v, PrimType p) {
  switch (p) {
    case PrimType::Bool: return v ? "true" : "false";
    case PrimType::U32: return std::to_string(v) + "u";
    case PrimType::U64: return "UINT64_C(" + std::to_string(v) + ")";
    default: return "(" + std::string(prim_ctype(p)) + ")" + std::to_string(v);
  }
}

std::string c_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

[[noreturn]] void unsupported(const std::string& what, Span span = {}) {
  throw Error(ErrorCode::UnsupportedConstruct, what, span);
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

struct Local {
  std::string c;
  /// Set when the local holds a known function, so calls can be direct.
  std::string direct;
};
using Scope = std::map<std::string, Local>;

class CEmitter {
 public:
  explicit CEmitter(const Program& program) : program_(program) {
    for (const auto& d : program.defs()) {
      if (!d.signature().binders.empty()) unsupported("'" + d.name() + "' is polymorphic", d.span);
      if (const FunDef* f = d.fun(); f && !is_anf(*f->body))
        unsupported("'" + d.name() + "' is not in A-normal form", d.span);
    }
    check_ = check_program(program);
    if (!check_.ok()) throw check_.errors.front();
    for (const auto& [_, tree] : check_.trees) index_tree(tree, index_);
    for (const auto& d : program.defs()) {
      ctype(d.signature().fun().arg);
      ctype(d.signature().fun().result);
    }
    for (const auto& d : program.defs()) {
      if (const FunDef* f = d.fun()) emit_fun(*f);
      else emit_abs(*d.abs());
    }
  }

  CEmission emission(const std::string& stem) const {
    std::ostringstream h;
    const std::string guard = "COGENT_GEN_" + escape(stem) + "_H";
    h << "#ifndef " << guard << "\n#define " << guard << "\n\n#include \"cogent_runtime.h\"\n\n";
    if (!tags_.empty()) {
      h << "typedef enum {\n";
      for (const auto& t : tags_) h << "  " << tag_name(t) << ",\n";
      h << "} cg_tag;\n\n";
    }
    for (const auto& d : type_defs_) h << d << "\n";
    for (const auto& p : prototypes_) h << p << ";\n";
    h << "\n#endif\n";
    std::ostringstream c;
    c << "#include \"" << stem << ".h\"\n\nuint64_t cg_live = 0;\n";
    for (const auto& f : functions_) c << "\n" << f;
    return {h.str(), c.str()};
  }

  std::string driver(const std::string& entry, const std::string& stem) {
    const Def* d = program_.find(entry);
    if (!d) throw Error(ErrorCode::NoEntryPoint, "entry point '" + entry + "' is not defined");
    const TFun& sig = d->signature().fun();
    const std::string reader = rd(sig.arg);
    const std::string printer = pr(sig.result);
    while (!io_work_.empty()) {
      auto [kind, t] = io_work_.front();
      io_work_.pop_front();
      if (kind == 'r') emit_reader(t);
      else if (kind == 'p') emit_printer(t);
      else emit_content_printer(t);
    }
    std::ostringstream out;
    out << "#define CG_DRIVER 1\n#include \"" << stem << ".h\"\n\n";
    for (const auto& p : io_protos_) out << p << ";\n";
    for (const auto& f : io_defs_) out << "\n" << f;
    out << "\nint main(int argc, char** argv) {\n"
        << "  " << ctype(sig.arg) << " arg;\n"
        << "  " << ctype(sig.result) << " res;\n"
        << "  if (argc != 2) {\n"
        << "    fprintf(stderr, \"usage: %s INPUT.json\\n\", argv[0]);\n"
        << "    return 2;\n"
        << "  }\n"
        << "  arg = " << reader << "(cg_json_load(argv[1]));\n"
        << "  res = " << fn_name(entry) << "(arg);\n"
        << "  fputs(\"{\\\"value\\\":\", stdout);\n"
        << "  " << printer << "(res);\n"
        << "  fputs(\",\\\"heap\\\":[\", stdout);\n"
        << "  cg_heap_flush();\n"
        << "  printf(\"],\\\"live\\\":%llu}\\n\", (unsigned long long)cg_live);\n"
        << "  return 0;\n"
        << "}\n";
    return out.str();
  }

 private:
  // -------------------------------------------------------------------------
  // Types

  std::string ctype(const TypeRef& t) {
    return std::visit(
        [&](const auto& ty) -> std::string {
          using T = std::decay_t<decltype(ty)>;
          if constexpr (std::is_same_v<T, TPrim>) {
            return prim_ctype(ty.prim);
          } else if constexpr (std::is_same_v<T, TUnit>) {
            return "cg_unit";
          } else if constexpr (std::is_same_v<T, TFun>) {
            const std::string a = ctype(ty.arg);
            const std::string r = ctype(ty.result);
            return named("fun(" + a + ")" + r, "cg_fn_", [&](const std::string& n) {
              return "typedef " + r + " (*" + n + ")(" + a + ");\n";
            });
          } else if constexpr (std::is_same_v<T, TVariant>) {
            std::map<std::string, std::string> alts;
            for (const auto& a : ty.alts) {
              alts.emplace(a.ctor, ctype(a.type));
              tags_.insert(a.ctor);
            }
            std::string key = "var{";
            for (const auto& [c, ct] : alts) key += c + ":" + ct + ";";
            return named(key + "}", "cg_var_", [&](const std::string& n) {
              std::string s = "typedef struct " + n + " {\n  cg_tag tag;\n  union {\n";
              for (const auto& [c, ct] : alts) s += "    " + ct + " " + member(c) + ";\n";
              return s + "  } u;\n} " + n + ";\n";
            });
          } else if constexpr (std::is_same_v<T, TRecord>) {
            std::vector<std::pair<std::string, std::string>> fields;
            for (const auto& f : ty.fields) fields.emplace_back(f.name, ctype(f.type));
            std::string key = "rec{";
            for (const auto& [f, ct] : fields) key += f + ":" + ct + ";";
            std::string s = named(key + "}", "cg_rec_", [&](const std::string& n) {
              std::string out = "typedef struct " + n + " {\n";
              for (const auto& [f, ct] : fields) out += "  " + ct + " " + member(f) + ";\n";
              return out + "} " + n + ";\n";
            });
            return ty.mode == Mode::Unboxed ? s : s + "*";
          } else if constexpr (std::is_same_v<T, TAbstract>) {
            if (ty.name != "WordArray") unsupported("no C representation for abstract type '" + ty.name + "'");
            elem_prim(t);
            return "cg_wordarray*";
          } else {
            unsupported("type " + type_to_string(t) + " is not ground");
          }
        },
        t->node);
  }

  template <class F>
  std::string named(const std::string& key, const char* prefix, F define) {
    if (auto it = types_.find(key); it != types_.end()) return it->second;
    const std::string name = prefix + std::to_string(types_.size());
    type_defs_.push_back(define(name));
    types_.emplace(key, name);
    return name;
  }

  static PrimType elem_prim(const TypeRef& t) {
    const auto* a = t->as<TAbstract>();
    const auto* p = a && a->args.size() == 1 ? a->args[0]->as<TPrim>() : nullptr;
    if (!p) unsupported("WordArray elements must be primitive in " + type_to_string(t));
    return p->prim;
  }

  /// Struct name behind a boxed record type.
  std::string struct_of(const TypeRef& t) {
    std::string s = ctype(t);
    if (!s.empty() && s.back() == '*') s.pop_back();
    return s;
  }

  TypeRef type_of(const Expr& e) const {
    if (const auto* l = e.as<ex::Lit>()) return t_prim(l->type);
    if (e.is<ex::Unit>()) return t_unit();
    auto it = index_.find(&e);
    if (it == index_.end()) unsupported("expression has no recorded type", e.span);
    return it->second->type;
  }

  // -------------------------------------------------------------------------
  // Functions

  std::string local(const std::string& name) { return escape(name) + "_" + std::to_string(locals_++); }

  std::string atom(const Expr& e, const Scope& scope) const {
    if (const auto* v = e.as<ex::Var>()) {
      auto it = scope.find(v->name);
      if (it == scope.end()) unsupported("unbound variable '" + v->name + "'", e.span);
      return it->second.c;
    }
    if (const auto* l = e.as<ex::Lit>()) return c_literal(l->value, l->type);
    if (e.is<ex::Unit>()) return "cg_unit_v";
    unsupported("operand is not atomic", e.span);
  }

  void emit_fun(const FunDef& f) {
    locals_ = 0;
    const TFun& sig = f.signature.fun();
    const std::string param = local(f.param);
    std::ostringstream out;
    out << "/* " << f.name << " : " << type_to_string(f.signature.body) << " */\n";
    std::string proto = ctype(sig.result) + " " + fn_name(f.name) + "(" + ctype(sig.arg) + " " + param + ")";
    prototypes_.push_back(proto);
    out << proto << " {\n  " << ctype(sig.result) << " cg_ret;\n";
    Scope scope{{f.param, {param, ""}}};
    stmt(*f.body, "cg_ret", scope, out, 1);
    out << "  return cg_ret;\n}\n";
    functions_.push_back(out.str());
  }

  void narrow(const std::string& src, const TVariant& from, const TypeRef& to, const std::string& dest,
              std::ostringstream& out, int ind) {
    const std::string ct = ctype(to);
    const auto& target = *to->as<TVariant>();
    out << pad(ind) << "switch (" << src << ".tag) {\n";
    for (const auto& a : from.alts) {
      if (!find_alt(target, a.ctor)) continue;
      out << pad(ind) << "  case " << tag_name(a.ctor) << ":\n"
          << pad(ind) << "    " << dest << " = (" << ct << "){.tag = " << tag_name(a.ctor) << ", .u." << member(a.ctor)
          << " = " << src << ".u." << member(a.ctor) << "};\n"
          << pad(ind) << "    break;\n";
    }
    out << pad(ind) << "  default:\n" << pad(ind) << "    cg_unreachable();\n" << pad(ind) << "}\n";
  }

  void stmt(const Expr& e, const std::string& dest, const Scope& scope, std::ostringstream& out, int ind) {
    const std::string p = pad(ind);
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ex::Var> || std::is_same_v<T, ex::Lit> || std::is_same_v<T, ex::Unit>) {
            out << p << dest << " = " << atom(e, scope) << ";\n";
          } else if constexpr (std::is_same_v<T, ex::FunRef>) {
            out << p << dest << " = " << fn_name(x.name) << ";\n";
          } else if constexpr (std::is_same_v<T, ex::PrimOpE>) {
            primop(x, type_of(e), dest, scope, out, ind);
          } else if constexpr (std::is_same_v<T, ex::App>) {
            std::string fn = atom(*x.fn, scope);
            if (const auto* v = x.fn->template as<ex::Var>())
              if (const auto& l = scope.at(v->name); !l.direct.empty()) fn = l.direct;
            out << p << dest << " = " << fn << "(" << atom(*x.arg, scope) << ");\n";
          } else if constexpr (std::is_same_v<T, ex::Let> || std::is_same_v<T, ex::LetBang>) {
            const std::string c = local(x.name);
            out << p << ctype(type_of(*x.bound)) << " " << c << ";\n";
            stmt(*x.bound, c, scope, out, ind);
            Scope inner = scope;
            const auto* fr = x.bound->template as<ex::FunRef>();
            inner[x.name] = Local{c, fr ? fn_name(fr->name) : ""};
            stmt(*x.body, dest, inner, out, ind);
          } else if constexpr (std::is_same_v<T, ex::If>) {
            out << p << "if (" << atom(*x.cond, scope) << ") {\n";
            stmt(*x.then_branch, dest, scope, out, ind + 1);
            out << p << "} else {\n";
            stmt(*x.else_branch, dest, scope, out, ind + 1);
            out << p << "}\n";
          } else if constexpr (std::is_same_v<T, ex::Cast>) {
            out << p << dest << " = (" << prim_ctype(x.target) << ")" << atom(*x.operand, scope) << ";\n";
          } else if constexpr (std::is_same_v<T, ex::Promote>) {
            const TypeRef from = type_of(*x.operand);
            narrow(atom(*x.operand, scope), *from->template as<TVariant>(), type_of(e), dest, out, ind);
          } else if constexpr (std::is_same_v<T, ex::Case>) {
            const std::string s = atom(*x.scrutinee, scope);
            const TypeRef st = type_of(*x.scrutinee);
            const auto& v = *st->template as<TVariant>();
            const Alternative* alt = find_alt(v, x.ctor);
            std::vector<Alternative> rest;
            for (const auto& a : v.alts)
              if (a.ctor != x.ctor) rest.push_back(a);
            const std::string m = local(x.match_var);
            out << p << "switch (" << s << ".tag) {\n" << p << "  case " << tag_name(x.ctor) << ": {\n";
            out << p << "    " << ctype(alt->type) << " " << m << " = " << s << ".u." << member(x.ctor) << ";\n";
            Scope in_match = scope;
            in_match[x.match_var] = Local{m, ""};
            stmt(*x.match_body, dest, in_match, out, ind + 2);
            out << p << "    break;\n" << p << "  }\n" << p << "  default: {\n";
            if (rest.empty()) {
              out << p << "    cg_unreachable();\n";
            } else {
              const TypeRef rt = t_variant(rest);
              const std::string r = local(x.else_var);
              out << p << "    " << ctype(rt) << " " << r << ";\n";
              narrow(s, v, rt, r, out, ind + 2);
              Scope in_else = scope;
              in_else[x.else_var] = Local{r, ""};
              stmt(*x.else_body, dest, in_else, out, ind + 2);
            }
            out << p << "    break;\n" << p << "  }\n" << p << "}\n";
          } else if constexpr (std::is_same_v<T, ex::Esac>) {
            const TypeRef st = type_of(*x.operand);
            const auto& v = *st->template as<TVariant>();
            if (v.alts.size() != 1) unsupported("esac on a variant with several alternatives", e.span);
            out << p << dest << " = " << atom(*x.operand, scope) << ".u." << member(v.alts[0].ctor) << ";\n";
          } else if constexpr (std::is_same_v<T, ex::Con>) {
            out << p << dest << " = (" << ctype(type_of(e)) << "){.tag = " << tag_name(x.ctor) << ", .u."
                << member(x.ctor) << " = " << atom(*x.operand, scope) << "};\n";
          } else if constexpr (std::is_same_v<T, ex::Struct>) {
            out << p << dest << " = (" << ctype(type_of(e)) << "){";
            for (std::size_t i = 0; i < x.fields.size(); ++i)
              out << (i ? ", " : "") << "." << member(x.fields[i].first) << " = " << atom(*x.fields[i].second, scope);
            out << "};\n";
          } else if constexpr (std::is_same_v<T, ex::Member>) {
            out << p << dest << " = " << atom(*x.record, scope) << access(type_of(*x.record)) << member(x.field) << ";\n";
          } else if constexpr (std::is_same_v<T, ex::Put>) {
            const std::string r = atom(*x.record, scope);
            const std::string v = atom(*x.value, scope);
            if (boxed(type_of(*x.record))) {
              out << p << r << "->" << member(x.field) << " = " << v << ";\n" << p << dest << " = " << r << ";\n";
            } else {
              out << p << dest << " = " << r << ";\n" << p << dest << "." << member(x.field) << " = " << v << ";\n";
            }
          } else if constexpr (std::is_same_v<T, ex::Take>) {
            const TypeRef rt = type_of(*x.record);
            const auto& rec = *rt->template as<TRecord>();
            const auto idx = find_field(rec, x.field);
            const std::string r = atom(*x.record, scope);
            const std::string y = local(x.field_var);
            const std::string rv = local(x.record_var);
            out << p << ctype(rec.fields[*idx].type) << " " << y << " = " << r << access(rt) << member(x.field) << ";\n";
            out << p << ctype(rt) << " " << rv << " = " << r << ";\n";
            Scope inner = scope;
            inner[x.field_var] = Local{y, ""};
            inner[x.record_var] = Local{rv, ""};
            stmt(*x.body, dest, inner, out, ind);
          } else {
            unsupported("match must be desugared before C emission", e.span);
          }
        },
        e.node);
  }

  static bool boxed(const TypeRef& t) {
    const auto* r = t->as<TRecord>();
    return r && r->mode != Mode::Unboxed;
  }
  static const char* access(const TypeRef& t) { return boxed(t) ? "->" : "."; }

  void primop(const ex::PrimOpE& x, const TypeRef& result, const std::string& dest, const Scope& scope,
              std::ostringstream& out, int ind) {
    const std::string p = pad(ind);
    const TypeRef at = type_of(*x.args.at(0));
    const PrimType prim = at->as<TPrim>() ? at->as<TPrim>()->prim : PrimType::Bool;
    const std::string t = prim_ctype(prim);
    const std::string w = prim == PrimType::U64 ? "uint64_t" : "uint32_t";
    const std::string a = atom(*x.args[0], scope);
    const std::string b = x.args.size() > 1 ? atom(*x.args[1], scope) : "";
    const std::string bits = std::to_string(prim_bits(prim));
    auto arith = [&](const char* op) {
      std::string core = "(" + w + ")" + a + " " + op + " (" + w + ")" + b;
      if (prim == PrimType::Bool) core = "(" + core + ") & 1u";
      return "(" + t + ")(" + core + ")";
    };
    std::string rhs;
    switch (x.op) {
      case PrimOp::Add: rhs = arith("+"); break;
      case PrimOp::Sub: rhs = arith("-"); break;
      case PrimOp::Mul: rhs = arith("*"); break;
      case PrimOp::BitAnd: rhs = arith("&"); break;
      case PrimOp::BitOr: rhs = arith("|"); break;
      case PrimOp::BitXor: rhs = arith("^"); break;
      case PrimOp::Div:
      case PrimOp::Mod:
        out << p << "if (" << b << " == 0) cg_raise(\"DivisionByZero\");\n";
        rhs = "(" + t + ")(" + a + (x.op == PrimOp::Div ? " / " : " % ") + b + ")";
        break;
      case PrimOp::Shl: rhs = "(" + t + ")cg_shl(" + a + ", " + b + ", " + bits + ")"; break;
      case PrimOp::Shr: rhs = "(" + t + ")cg_shr(" + a + ", " + b + ", " + bits + ")"; break;
      case PrimOp::Complement:
        rhs = prim == PrimType::Bool ? "!" + a : "(" + t + ")~(" + w + ")" + a;
        break;
      case PrimOp::Eq: rhs = a + " == " + b; break;
      case PrimOp::Ne: rhs = a + " != " + b; break;
      case PrimOp::Lt: rhs = a + " < " + b; break;
      case PrimOp::Le: rhs = a + " <= " + b; break;
      case PrimOp::Gt: rhs = a + " > " + b; break;
      case PrimOp::Ge: rhs = a + " >= " + b; break;
      case PrimOp::And: rhs = a + " && " + b; break;
      case PrimOp::Or: rhs = a + " || " + b; break;
      case PrimOp::Not: rhs = "!" + a; break;
    }
    (void)result;
    out << p << dest << " = " << rhs << ";\n";
  }

  // -------------------------------------------------------------------------
  // Abstract functions

  void emit_abs(const AbsFunDecl& d) {
    const AbsInstance target = abstract_target(program_, d.name, {});
    const TFun& sig = d.signature.fun();
    const std::string r = ctype(sig.result);
    std::string proto = r + " " + fn_name(d.name) + "(" + ctype(sig.arg) + " x)";
    prototypes_.push_back(proto);
    std::ostringstream out;
    out << "/* " << d.name << " : " << type_to_string(d.signature.body) << " */\n" << proto << " {\n";
    const std::string& n = target.name;
    auto field_type = [&](const TypeRef& rec, const char* name) {
      const auto* tr = rec->as<TRecord>();
      const auto idx = tr ? find_field(*tr, name) : std::nullopt;
      if (!idx) unsupported("'" + d.name + "' lacks field '" + name + "'");
      return tr->fields[*idx].type;
    };
    auto con = [&](const char* ctor, const std::string& v) {
      return "(" + r + "){.tag = " + tag_name(ctor) + ", .u." + member(ctor) + " = " + v + "}";
    };
    if (n == "wordarray_create") {
      out << "  cg_wordarray* a = cg_wa_create(x);\n"
          << "  if (a) return " << con("Ok", "a") << ";\n"
          << "  return " << con("Err", "cg_unit_v") << ";\n";
    } else if (n == "wordarray_free") {
      out << "  cg_wa_free(x);\n  return cg_unit_v;\n";
    } else if (n == "wordarray_length") {
      out << "  return x->len;\n";
    } else if (n == "wordarray_get") {
      const std::string et = prim_ctype(elem_prim(field_type(sig.arg, "arr")));
      out << "  if (x.idx < x.arr->len) return " << con("Ok", "(" + et + ")x.arr->data[x.idx]") << ";\n"
          << "  return " << con("Err", "cg_unit_v") << ";\n";
    } else if (n == "wordarray_put") {
      out << "  if (x.idx < x.arr->len) {\n"
          << "    x.arr->data[x.idx] = (uint64_t)x.val;\n"
          << "    return " << con("Ok", "x.arr") << ";\n"
          << "  }\n"
          << "  return " << con("Err", "x.arr") << ";\n";
    } else if (n == "wordarray_map_no_break") {
      const std::string et = prim_ctype(elem_prim(field_type(sig.arg, "arr")));
      const TypeRef ft = field_type(sig.arg, "f");
      const std::string er = ctype(ft->as<TFun>()->arg);
      out << "  uint32_t i;\n"
          << "  for (i = 0; i < x.arr->len; ++i) {\n"
          << "    " << er << " step = x.f((" << er << "){.elem = (" << et << ")x.arr->data[i], .acc = x.acc});\n"
          << "    x.arr->data[i] = (uint64_t)step.elem;\n"
          << "    x.acc = step.acc;\n"
          << "  }\n"
          << "  return (" << r << "){.arr = x.arr, .acc = x.acc};\n";
    } else if (n.rfind("alloc_", 0) == 0 && boxed(sig.result)) {
      const std::string s = struct_of(sig.result);
      out << "  (void)x;\n  return (" << s << "*)cg_alloc(sizeof(" << s << "));\n";
    } else if (n.rfind("free_", 0) == 0 && boxed(sig.arg)) {
      out << "  cg_free(x);\n  return cg_unit_v;\n";
    } else {
      unsupported("no C implementation for abstract function '" + n + "'");
    }
    out << "}\n";
    functions_.push_back(out.str());
  }

  // -------------------------------------------------------------------------
  // Driver readers and printers

  std::string io_name(char kind, const TypeRef& t) {
    const std::string key = std::string(1, kind) + type_key(*t);
    if (auto it = io_.find(key); it != io_.end()) return it->second;
    const std::string prefix = kind == 'r' ? "cg_rd_" : kind == 'p' ? "cg_pr_" : "cg_pc_";
    const std::string name = prefix + std::to_string(io_.size());
    io_.emplace(key, name);
    io_work_.emplace_back(kind, t);
    const std::string ct = ctype(t);
    if (kind == 'r') io_protos_.push_back("static " + ct + " " + name + "(const cg_json* j)");
    else if (kind == 'p') io_protos_.push_back("static void " + name + "(" + ct + " v)");
    else io_protos_.push_back("static void " + name + "(const void* p)");
    return name;
  }
  std::string rd(const TypeRef& t) { return io_name('r', t); }
  std::string pr(const TypeRef& t) { return io_name('p', t); }
  std::string pc(const TypeRef& t) { return io_name('c', t); }

  std::vector<const Def*> functions_of(const TypeRef& t) const {
    std::vector<const Def*> out;
    for (const auto& d : program_.defs())
      if (type_equal(d.signature().body, t)) out.push_back(&d);
    return out;
  }

  static std::string ty_name(PrimType p) { return c_string(std::string(prim_name(p))); }

  void emit_reader(const TypeRef& t) {
    const std::string name = io_.at("r" + type_key(*t));
    const std::string ct = ctype(t);
    std::ostringstream out;
    out << "static " << ct << " " << name << "(const cg_json* j) {\n";
    std::visit(
        [&](const auto& ty) {
          using T = std::decay_t<decltype(ty)>;
          if constexpr (std::is_same_v<T, TPrim>) {
            out << "  return (" << ct << ")cg_read_lit(j, " << ty_name(ty.prim) << ");\n";
          } else if constexpr (std::is_same_v<T, TUnit>) {
            out << "  (void)cg_jneed(j, \"unit\");\n  return cg_unit_v;\n";
          } else if constexpr (std::is_same_v<T, TFun>) {
            out << "  const char* n = cg_read_fun(j);\n";
            for (const Def* d : functions_of(t))
              out << "  if (strcmp(n, " << c_string(d->name()) << ") == 0) return " << fn_name(d->name()) << ";\n";
            out << "  cg_fatal(\"unknown function\");\n  return NULL;\n";
          } else if constexpr (std::is_same_v<T, TVariant>) {
            out << "  const char* c;\n  const cg_json* p = cg_read_con(j, &c);\n";
            for (const auto& a : ty.alts)
              out << "  if (strcmp(c, " << c_string(a.ctor) << ") == 0) return (" << ct << "){.tag = " << tag_name(a.ctor)
                  << ", .u." << member(a.ctor) << " = " << rd(a.type) << "(p)};\n";
            out << "  cg_fatal(\"unknown constructor\");\n  return (" << ct << "){.tag = " << tag_name(ty.alts[0].ctor)
                << "};\n";
          } else if constexpr (std::is_same_v<T, TRecord>) {
            const std::string s = struct_of(t);
            out << "  const cg_json* o = cg_jneed(j, \"rec\");\n  " << s << " v;\n  memset(&v, 0, sizeof v);\n";
            for (const auto& f : ty.fields)
              if (!f.taken)
                out << "  v." << member(f.name) << " = " << rd(f.type) << "(cg_jneed(o, " << c_string(f.name) << "));\n";
            if (ty.mode == Mode::Unboxed) {
              out << "  return v;\n";
            } else {
              out << "  " << s << "* p = (" << s << "*)cg_alloc(sizeof v);\n  *p = v;\n  return p;\n";
            }
          } else if constexpr (std::is_same_v<T, TAbstract>) {
            out << "  return cg_wa_read(j, " << ty_name(elem_prim(t)) << ");\n";
          }
        },
        t->node);
    out << "}\n";
    io_defs_.push_back(out.str());
  }

  void emit_printer(const TypeRef& t) {
    const std::string name = io_.at("p" + type_key(*t));
    std::ostringstream out;
    out << "static void " << name << "(" << ctype(t) << " v) {\n";
    std::visit(
        [&](const auto& ty) {
          using T = std::decay_t<decltype(ty)>;
          if constexpr (std::is_same_v<T, TPrim>) {
            out << "  cg_print_lit((uint64_t)v, " << ty_name(ty.prim) << ");\n";
          } else if constexpr (std::is_same_v<T, TUnit>) {
            out << "  (void)v;\n  fputs(\"{\\\"unit\\\":null}\", stdout);\n";
          } else if constexpr (std::is_same_v<T, TFun>) {
            for (const Def* d : functions_of(t))
              out << "  if (v == " << fn_name(d->name()) << ") {\n    fputs(" << c_string(
                      std::string("{\"") + (d->fun() ? "fun" : "absfun") + "\":\"" + d->name() + "\"}")
                  << ", stdout);\n    return;\n  }\n";
            out << "  cg_fatal(\"unknown function pointer\");\n";
          } else if constexpr (std::is_same_v<T, TVariant>) {
            out << "  switch (v.tag) {\n";
            for (const auto& a : ty.alts) {
              out << "    case " << tag_name(a.ctor) << ":\n      fputs(" << c_string("{\"con\":[\"" + a.ctor + "\",")
                  << ", stdout);\n      " << pr(a.type) << "(v.u." << member(a.ctor) << ");\n      fputs(\"]}\", stdout);\n"
                  << "      break;\n";
            }
            out << "    default:\n      cg_unreachable();\n  }\n";
          } else if constexpr (std::is_same_v<T, TRecord>) {
            if (ty.mode != Mode::Unboxed) {
              out << "  cg_heap_ref(v, " << pc(t) << ");\n";
            } else {
              out << "  fputs(\"{\\\"rec\\\":{\", stdout);\n";
              bool first = true;
              for (const auto& f : ty.fields) {
                if (f.taken) continue;
                out << "  fputs(" << c_string((first ? "\"" : ",\"") + f.name + "\":") << ", stdout);\n  " << pr(f.type)
                    << "(v." << member(f.name) << ");\n";
                first = false;
              }
              out << "  fputs(\"}}\", stdout);\n";
            }
          } else if constexpr (std::is_same_v<T, TAbstract>) {
            out << "  cg_heap_ref(v, " << pc(t) << ");\n";
          }
        },
        t->node);
    out << "}\n";
    io_defs_.push_back(out.str());
  }

  void emit_content_printer(const TypeRef& t) {
    const std::string name = io_.at("c" + type_key(*t));
    std::ostringstream out;
    out << "static void " << name << "(const void* p) {\n";
    if (const auto* r = t->as<TRecord>()) {
      const TypeRef inline_type = t_record(r->fields, Mode::Unboxed);
      out << "  " << pr(inline_type) << "(*(const " << struct_of(t) << "*)p);\n";
    } else {
      out << "  cg_wa_print((const cg_wordarray*)p, " << ty_name(elem_prim(t)) << ");\n";
    }
    out << "}\n";
    io_defs_.push_back(out.str());
  }

  const Program& program_;
  ProgramCheck check_;
  TreeIndex index_;
  std::map<std::string, std::string> types_;
  std::vector<std::string> type_defs_;
  std::set<std::string> tags_;
  std::vector<std::string> prototypes_;
  std::vector<std::string> functions_;
  std::size_t locals_ = 0;

  std::map<std::string, std::string> io_;
  std::deque<std::pair<char, TypeRef>> io_work_;
  std::vector<std::string> io_protos_;
  std::vector<std::string> io_defs_;
};

// ---------------------------------------------------------------------------
// Canonical results

class Canonicaliser {
 public:
  explicit Canonicaliser(const Store& store) : store_(store) {}

  nlohmann::json run(const Value& u, const TypeRef& t) {
    nlohmann::json value = walk(u, t);
    nlohmann::json heap = nlohmann::json::array();
    for (std::size_t i = 0; i < heap_.size(); ++i) heap.push_back(content(heap_[i].first, heap_[i].second));
    return {{"value", std::move(value)}, {"heap", std::move(heap)}, {"live", store_.cells().size()}};
  }

 private:
  nlohmann::json ref(const Value& u, const TypeRef& t) {
    const auto* p = u.as<Value::Ptr>();
    if (!p) throw Error(ErrorCode::InvalidValue, "expected a pointer at " + type_to_string(t));
    auto it = ids_.find(p->id);
    if (it == ids_.end()) {
      heap_.emplace_back(p->id, t);
      it = ids_.emplace(p->id, heap_.size()).first;
    }
    return {{"ptr", it->second}};
  }

  nlohmann::json record(const Value& u, const TRecord& r) {
    const auto* rec = u.as<Value::Record>();
    if (!rec) throw Error(ErrorCode::InvalidValue, "expected a record");
    nlohmann::json fields = nlohmann::json::object();
    for (std::size_t i = 0; i < r.fields.size(); ++i)
      if (!r.fields[i].taken) fields[r.fields[i].name] = walk(rec->fields.at(i).second, r.fields[i].type);
    return {{"rec", std::move(fields)}};
  }

  nlohmann::json content(std::uint64_t p, const TypeRef& t) {
    const Value& cell = store_.at(p);
    if (const auto* r = t->as<TRecord>()) return record(cell, *r);
    nlohmann::json items = nlohmann::json::array();
    if (const auto* a = cell.as<Value::Abstract>())
      for (const auto& i : a->items) items.push_back(value_to_json(i));
    return {{"abs", t->as<TAbstract>()->name}, {"items", std::move(items)}};
  }

  nlohmann::json walk(const Value& u, const TypeRef& t) {
    if (const auto* r = t->as<TRecord>()) return r->mode == Mode::Unboxed ? record(u, *r) : ref(u, t);
    if (t->is<TAbstract>()) return ref(u, t);
    if (const auto* v = t->as<TVariant>()) {
      const auto* c = u.as<Value::Con>();
      const Alternative* alt = c ? find_alt(*v, c->ctor) : nullptr;
      if (!alt) throw Error(ErrorCode::InvalidValue, "expected a constructor of " + type_to_string(t));
      return {{"con", nlohmann::json::array({c->ctor, walk(*c->payload, alt->type)})}};
    }
    if (const auto* f = u.as<Value::Fun>()) return {{"fun", f->name}};
    if (const auto* f = u.as<Value::AbsFun>()) return {{"absfun", f->name}};
    return value_to_json(u);
  }

  const Store& store_;
  std::vector<std::pair<std::uint64_t, TypeRef>> heap_;
  std::map<std::uint64_t, std::size_t> ids_;
};

// ---------------------------------------------------------------------------
// Processes

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "cogc-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw Error(ErrorCode::CompileFailure, "cannot create a temporary directory");
    path = tmpl;
  }
  ~TempDir() {
    if (!std::getenv("COGC_KEEP_C")) {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  }
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs a shell command, returning its exit status and standard output.
// Functions named by argument values need instances of their own.
void value_roots(const Value& v, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Value::Fun> || std::is_same_v<T, Value::AbsFun>) {
          if (x.type_args.empty() && std::find(out.begin(), out.end(), x.name) == out.end()) out.push_back(x.name);
        } else if constexpr (std::is_same_v<T, Value::Con>) {
          value_roots(*x.payload, out);
        } else if constexpr (std::is_same_v<T, Value::Record>) {
          for (const auto& f : x.fields) value_roots(f.second, out);
        } else if constexpr (std::is_same_v<T, Value::Abstract>) {
          for (const auto& i : x.items) value_roots(i, out);
        }
      },
      v.node);
}

std::pair<int, std::string> run_command(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {status, out};
}

}  // namespace

CEmission emit_c(const Program& program, const std::string& stem) { return CEmitter(program).emission(stem); }

std::string emit_driver(const Program& program, const std::string& entry, const std::string& stem) {
  return CEmitter(program).driver(entry, stem);
}

std::vector<std::string> write_c_files(const Program& program, const std::string& dir, const std::string& stem,
                                       const std::optional<std::string>& entry) {
  CEmitter em(program);
  const CEmission c = em.emission(stem);
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files = {
      {"cogent_runtime.h", c_runtime_header()}, {stem + ".h", c.header}, {stem + ".c", c.source}};
  if (entry) files.emplace_back(stem + "_driver.c", em.driver(*entry, stem));
  std::vector<std::string> written;
  for (const auto& [name, text] : files) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream(p, std::ios::binary) << text;
    written.push_back(p.string());
  }
  return written;
}

nlohmann::json canonical_result(const Value& u, const Store& store, const TypeRef& t) {
  return Canonicaliser(store).run(u, t);
}

std::optional<std::string> find_c_compiler() {
  auto executable = [](const fs::path& p) {
    std::error_code ec;
    return fs::is_regular_file(p, ec) && access(p.c_str(), X_OK) == 0;
  };
  auto resolve = [&](const std::string& name) -> std::optional<std::string> {
    if (name.find('/') != std::string::npos) return executable(name) ? std::optional(name) : std::nullopt;
    const char* path = std::getenv("PATH");
    if (!path) return std::nullopt;
    std::stringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      const fs::path p = fs::path(dir.empty() ? "." : dir) / name;
      if (executable(p)) return p.string();
    }
    return std::nullopt;
  };
  if (const char* cc = std::getenv("CC"); cc && *cc) return resolve(cc);
  for (const char* name : {"cc", "gcc", "clang"})
    if (auto found = resolve(name)) return found;
  return std::nullopt;
}

nlohmann::json DiffVerdict::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json j = {{"input", c.input}, {"match", c.match}, {"expected", c.expected}, {"actual", c.actual}};
    if (!c.match) j["path"] = c.path;
    cs.push_back(std::move(j));
  }
  return {{"status", status}, {"compiler", compiler}, {"cases", std::move(cs)}};
}

DiffVerdict diff_run_c(const Program& program, const std::string& fname, const std::vector<Value>& inputs) {
  DiffVerdict verdict;
  const auto cc = find_c_compiler();
  if (!cc) {
    verdict.status = "SKIPPED";
    return verdict;
  }
  verdict.compiler = *cc;

  const Program desugared = desugar_program(program);
  require_well_typed(desugared);
  std::vector<std::string> roots{fname};
  for (const auto& in : inputs) value_roots(in, roots);
  MonoResult mono = monomorphise(desugared, roots);
  const Program anf = a_normalise(mono.program);
  require_well_typed(anf);
  const std::string entry = mono.renames.lookup(fname, {});
  const Registry registry = builtin_library(anf);

  TempDir tmp;
  const std::string stem = "prog";
  write_c_files(anf, tmp.path.string(), stem, entry);
  const fs::path exe = tmp.path / "driver";
  const fs::path log = tmp.path / "cc.log";
  const std::string cmd = quote(*cc) +
                          " -std=c11 -pedantic-errors -Wall -Wextra -Werror -Wno-unused-variable"
                          " -Wno-unused-but-set-variable -Wno-unused-parameter -Wno-unused-function -O1 -o " +
                          quote(exe.string()) + " " + quote((tmp.path / (stem + ".c")).string()) + " " +
                          quote((tmp.path / (stem + "_driver.c")).string()) + " >" + quote(log.string()) + " 2>&1";
  if (std::system(cmd.c_str()) != 0)
    throw Error(ErrorCode::CompileFailure, "C compiler rejected the generated code:\n" + read_file(log));

  const Def& def = *anf.find(entry);
  const TFun& sig = def.signature().fun();
  verdict.status = "PASS";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    DiffCase dc;
    const Value arg = mono_val(mono.renames, inputs[i]);
    dc.input = value_to_json(arg);
    try {
      Store store;
      const Value u = lift_value(arg, sig.arg, store, registry);
      auto [res, out] = apply_fn_u(anf, registry, entry, {}, u, std::move(store));
      dc.expected = canonical_result(res, out, sig.result);
    } catch (const Error& e) {
      dc.expected = {{"error", std::string(error_code_name(e.code()))}};
    }
    const fs::path in = tmp.path / ("input" + std::to_string(i) + ".json");
    std::ofstream(in) << dc.input.dump();
    auto [status, text] = run_command(quote(exe.string()) + " " + quote(in.string()) + " 2>/dev/null");
    try {
      dc.actual = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      dc.actual = {{"crash", status}, {"stdout", text}};
    }
    dc.match = status == 0 && dc.actual == dc.expected;
    if (!dc.match) {
      const nlohmann::json patch = nlohmann::json::diff(dc.expected, dc.actual);
      dc.path = patch.empty() ? "" : patch[0].value("path", "");
      verdict.status = "FAIL";
    }
    verdict.cases.push_back(std::move(dc));
  }
  return verdict;
}

}  // namespace cogent
