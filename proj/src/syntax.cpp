#include "cogent/syntax.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace cogent {

namespace {

// ---------------------------------------------------------------------------
// S-expression reader

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  Span span;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

  SExpr read_one() {
    skip_ws();
    SExpr s = read();
    skip_ws();
    if (pos_ < text_.size()) fail("expected end of input");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCode::ParseError, msg,
                Span{static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ + 1)});
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    if (pos_ >= text_.size()) fail("expected one of: '(', atom; found end of input");
    const std::size_t start = pos_;
    if (text_[pos_] == ')') fail("unexpected ')'");
    SExpr s;
    if (text_[pos_] == '(') {
      ++pos_;
      s.is_list = true;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        s.items.push_back(read());
        skip_ws();
      }
      if (pos_ >= text_.size()) {
        pos_ = start;
        fail("expected ')' to close list");
      }
      ++pos_;
    } else {
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
        ++pos_;
      }
      s.atom = std::string(text_.substr(start, pos_ - start));
    }
    s.span = Span{static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(pos_)};
    return s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// S-expression -> AST

const std::set<std::string, std::less<>> kReserved = {
    "unit", "u8", "u16", "u32", "u64", "bool", "true", "false", "def", "absdef", "forall", "fn",
    "fun", "variant", "rec", "abs", "tuple", "taken", "ro", "wr", "ub"};

[[noreturn]] void fail_at(const SExpr& s, const std::string& msg) {
  throw Error(ErrorCode::ParseError, msg, s.span);
}

bool is_head(const SExpr& s, std::string_view head) {
  return s.is_list && !s.items.empty() && !s.items[0].is_list && s.items[0].atom == head;
}

std::string expect_name(const SExpr& s, std::string_view what) {
  if (s.is_list) fail_at(s, "expected " + std::string(what) + ", found list");
  const std::string& a = s.atom;
  const unsigned char c0 = static_cast<unsigned char>(a.front());
  if (!(std::isalpha(c0) || a.front() == '_')) fail_at(s, "expected " + std::string(what) + ", found '" + a + "'");
  for (char c : a) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '\''))
      fail_at(s, "invalid character in " + std::string(what) + " '" + a + "'");
  }
  if (kReserved.count(a)) fail_at(s, "reserved word '" + a + "' used as " + std::string(what));
  return a;
}

const SExpr& expect_list(const SExpr& s, std::string_view what) {
  if (!s.is_list) fail_at(s, "expected " + std::string(what) + ", found atom '" + s.atom + "'");
  return s;
}

void expect_arity(const SExpr& s, std::size_t n, std::string_view form) {
  if (s.items.size() != n)
    fail_at(s, "'" + std::string(form) + "' expects " + std::to_string(n - 1) + " operands, found " +
                   std::to_string(s.items.size() - 1));
}

std::optional<PrimType> prim_from_atom(std::string_view a) {
  if (a == "u8") return PrimType::U8;
  if (a == "u16") return PrimType::U16;
  if (a == "u32") return PrimType::U32;
  if (a == "u64") return PrimType::U64;
  if (a == "bool") return PrimType::Bool;
  return std::nullopt;
}

Mode parse_mode(const SExpr& s) {
  if (!s.is_list) {
    if (s.atom == "ro") return Mode::ReadOnly;
    if (s.atom == "wr") return Mode::Writable;
    if (s.atom == "ub") return Mode::Unboxed;
  }
  fail_at(s, "expected one of: ro, wr, ub");
}

TypeRef parse_type_s(const SExpr& s);

std::vector<Alternative> parse_alts(const std::vector<SExpr>& items, std::size_t from,
                                    const SExpr& whole) {
  std::vector<Alternative> alts;
  std::set<std::string> seen;
  for (std::size_t i = from; i < items.size(); ++i) {
    const SExpr& a = expect_list(items[i], "(CTOR type)");
    if (a.items.size() != 2) fail_at(a, "expected (CTOR type)");
    std::string ctor = expect_name(a.items[0], "constructor");
    if (!seen.insert(ctor).second)
      throw Error(ErrorCode::DuplicateConstructor, "duplicate constructor '" + ctor + "'", a.span);
    alts.push_back({std::move(ctor), parse_type_s(a.items[1])});
  }
  if (alts.empty()) fail_at(whole, "variant needs at least one alternative");
  return alts;
}

TypeRef parse_type_s(const SExpr& s) {
  if (!s.is_list) {
    if (s.atom == "unit") return t_unit();
    if (auto p = prim_from_atom(s.atom)) return t_prim(*p);
    return t_var(expect_name(s, "type"));
  }
  if (s.items.empty() || s.items[0].is_list) fail_at(s, "expected one of: !, fun, variant, rec, abs, tuple");
  const std::string& head = s.items[0].atom;
  if (head == "!") {
    expect_arity(s, 2, "!");
    return t_observed(expect_name(s.items[1], "type variable"));
  }
  if (head == "fun") {
    expect_arity(s, 3, "fun");
    return t_fun(parse_type_s(s.items[1]), parse_type_s(s.items[2]));
  }
  if (head == "variant") return t_variant(parse_alts(s.items, 1, s));
  if (head == "rec") {
    if (s.items.size() < 3) fail_at(s, "record needs a mode and at least one field");
    const Mode m = parse_mode(s.items[1]);
    std::vector<FieldType> fields;
    std::set<std::string> seen;
    for (std::size_t i = 2; i < s.items.size(); ++i) {
      const SExpr& f = expect_list(s.items[i], "(FIELD type [taken])");
      if (f.items.size() != 2 && f.items.size() != 3) fail_at(f, "expected (FIELD type [taken])");
      std::string name = expect_name(f.items[0], "field");
      if (!seen.insert(name).second)
        throw Error(ErrorCode::DuplicateField, "duplicate field '" + name + "'", f.span);
      bool taken = false;
      if (f.items.size() == 3) {
        if (f.items[2].is_list || f.items[2].atom != "taken") fail_at(f.items[2], "expected 'taken'");
        taken = true;
      }
      fields.push_back({std::move(name), parse_type_s(f.items[1]), taken});
    }
    return t_record(std::move(fields), m);
  }
  if (head == "abs") {
    if (s.items.size() < 3) fail_at(s, "expected (abs NAME mode type*)");
    std::string name = expect_name(s.items[1], "abstract type name");
    const Mode m = parse_mode(s.items[2]);
    std::vector<TypeRef> args;
    for (std::size_t i = 3; i < s.items.size(); ++i) args.push_back(parse_type_s(s.items[i]));
    return t_abstract(std::move(name), std::move(args), m);
  }
  if (head == "tuple") {
    if (s.items.size() < 3) fail_at(s, "tuple needs at least two components");
    std::vector<FieldType> fields;
    for (std::size_t i = 1; i < s.items.size(); ++i)
      fields.push_back({"p" + std::to_string(i), parse_type_s(s.items[i]), false});
    return t_record(std::move(fields), Mode::Unboxed);
  }
  fail_at(s.items[0], "expected one of: !, fun, variant, rec, abs, tuple");
}

std::optional<ex::Lit> parse_literal(const SExpr& s) {
  if (s.is_list) return std::nullopt;
  const std::string& a = s.atom;
  if (a == "true") return ex::Lit{1, PrimType::Bool};
  if (a == "false") return ex::Lit{0, PrimType::Bool};
  if (a.empty() || !std::isdigit(static_cast<unsigned char>(a.front()))) return std::nullopt;
  std::size_t digits = 0;
  while (digits < a.size() && std::isdigit(static_cast<unsigned char>(a[digits]))) ++digits;
  PrimType type = PrimType::U32;
  if (digits < a.size()) {
    auto p = prim_from_atom(std::string_view(a).substr(digits));
    if (!p || *p == PrimType::Bool) fail_at(s, "invalid literal suffix in '" + a + "'");
    type = *p;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(a.data(), a.data() + digits, value);
  if (ec != std::errc{}) fail_at(s, "integer literal '" + a + "' does not fit in 64 bits");
  return ex::Lit{value, type};
}

ExprRef parse_expr_s(const SExpr& s);

std::vector<ExprRef> parse_exprs(const std::vector<SExpr>& items, std::size_t from) {
  std::vector<ExprRef> out;
  for (std::size_t i = from; i < items.size(); ++i) out.push_back(parse_expr_s(items[i]));
  return out;
}

ExprRef parse_expr_s(const SExpr& s) {
  if (!s.is_list) {
    if (s.atom == "unit") return make_expr(ex::Unit{}, s.span);
    if (auto lit = parse_literal(s)) return make_expr(*lit, s.span);
    return make_expr(ex::Var{expect_name(s, "expression")}, s.span);
  }
  if (s.items.empty() || s.items[0].is_list)
    fail_at(s, "expected one of: funref, op, app, let, letbang, if, cast, promote, con, case, esac, "
               "struct, member, put, take, match, tuple");
  const std::string& head = s.items[0].atom;
  const auto& it = s.items;
  if (head == "funref") {
    if (it.size() < 2) fail_at(s, "expected (funref NAME type*)");
    std::vector<TypeRef> targs;
    for (std::size_t i = 2; i < it.size(); ++i) targs.push_back(parse_type_s(it[i]));
    return make_expr(ex::FunRef{expect_name(it[1], "function name"), std::move(targs)}, s.span);
  }
  if (head == "op") {
    if (it.size() < 3) fail_at(s, "expected (op OPNAME expr+)");
    if (it[1].is_list) fail_at(it[1], "expected operator name");
    auto op = primop_from_name(it[1].atom);
    if (!op) fail_at(it[1], "unknown operator '" + it[1].atom + "'");
    return make_expr(ex::PrimOpE{*op, parse_exprs(it, 2)}, s.span);
  }
  if (head == "app") {
    expect_arity(s, 3, "app");
    return make_expr(ex::App{parse_expr_s(it[1]), parse_expr_s(it[2])}, s.span);
  }
  if (head == "let") {
    expect_arity(s, 4, "let");
    return make_expr(ex::Let{expect_name(it[1], "variable"), parse_expr_s(it[2]), parse_expr_s(it[3])},
                     s.span);
  }
  if (head == "letbang") {
    expect_arity(s, 5, "letbang");
    const SExpr& obs = expect_list(it[1], "(NAME*)");
    std::vector<std::string> observed;
    for (const auto& o : obs.items) observed.push_back(expect_name(o, "variable"));
    return make_expr(ex::LetBang{std::move(observed), expect_name(it[2], "variable"),
                                 parse_expr_s(it[3]), parse_expr_s(it[4])},
                     s.span);
  }
  if (head == "if") {
    expect_arity(s, 4, "if");
    return make_expr(ex::If{parse_expr_s(it[1]), parse_expr_s(it[2]), parse_expr_s(it[3])}, s.span);
  }
  if (head == "cast") {
    expect_arity(s, 3, "cast");
    auto p = it[1].is_list ? std::nullopt : prim_from_atom(it[1].atom);
    if (!p) fail_at(it[1], "expected one of: u8, u16, u32, u64, bool");
    return make_expr(ex::Cast{*p, parse_expr_s(it[2])}, s.span);
  }
  if (head == "promote") {
    expect_arity(s, 3, "promote");
    const SExpr& alts = expect_list(it[1], "((CTOR type)+)");
    return make_expr(ex::Promote{parse_alts(alts.items, 0, alts), parse_expr_s(it[2])}, s.span);
  }
  if (head == "con") {
    expect_arity(s, 3, "con");
    return make_expr(ex::Con{expect_name(it[1], "constructor"), parse_expr_s(it[2])}, s.span);
  }
  if (head == "case") {
    expect_arity(s, 7, "case");
    return make_expr(ex::Case{parse_expr_s(it[1]), expect_name(it[2], "constructor"),
                              expect_name(it[3], "variable"), parse_expr_s(it[4]),
                              expect_name(it[5], "variable"), parse_expr_s(it[6])},
                     s.span);
  }
  if (head == "esac") {
    expect_arity(s, 2, "esac");
    return make_expr(ex::Esac{parse_expr_s(it[1])}, s.span);
  }
  if (head == "struct" || head == "tuple") {
    std::vector<std::pair<std::string, ExprRef>> fields;
    if (head == "tuple") {
      if (it.size() < 3) fail_at(s, "tuple needs at least two components");
      for (std::size_t i = 1; i < it.size(); ++i)
        fields.emplace_back("p" + std::to_string(i), parse_expr_s(it[i]));
    } else {
      expect_arity(s, 2, "struct");
      const SExpr& fs = expect_list(it[1], "((FIELD expr)+)");
      if (fs.items.empty()) fail_at(fs, "struct needs at least one field");
      std::set<std::string> seen;
      for (const auto& f : fs.items) {
        const SExpr& fl = expect_list(f, "(FIELD expr)");
        if (fl.items.size() != 2) fail_at(fl, "expected (FIELD expr)");
        std::string name = expect_name(fl.items[0], "field");
        if (!seen.insert(name).second)
          throw Error(ErrorCode::DuplicateField, "duplicate field '" + name + "'", fl.span);
        fields.emplace_back(std::move(name), parse_expr_s(fl.items[1]));
      }
    }
    return make_expr(ex::Struct{std::move(fields)}, s.span);
  }
  if (head == "member") {
    expect_arity(s, 3, "member");
    return make_expr(ex::Member{parse_expr_s(it[1]), expect_name(it[2], "field")}, s.span);
  }
  if (head == "put") {
    expect_arity(s, 4, "put");
    return make_expr(ex::Put{parse_expr_s(it[1]), expect_name(it[2], "field"), parse_expr_s(it[3])},
                     s.span);
  }
  if (head == "take") {
    expect_arity(s, 6, "take");
    return make_expr(ex::Take{expect_name(it[1], "variable"), expect_name(it[2], "field"),
                              expect_name(it[3], "variable"), parse_expr_s(it[4]),
                              parse_expr_s(it[5])},
                     s.span);
  }
  if (head == "match") {
    if (it.size() < 3) fail_at(s, "expected (match expr (CTOR NAME expr)+)");
    std::vector<ex::MatchArm> arms;
    for (std::size_t i = 2; i < it.size(); ++i) {
      const SExpr& a = expect_list(it[i], "(CTOR NAME expr)");
      if (a.items.size() != 3) fail_at(a, "expected (CTOR NAME expr)");
      arms.push_back({expect_name(a.items[0], "constructor"), expect_name(a.items[1], "variable"),
                      parse_expr_s(a.items[2])});
    }
    return make_expr(ex::Match{parse_expr_s(it[1]), std::move(arms)}, s.span);
  }
  fail_at(s.items[0], "unknown form '" + head + "'");
}

std::vector<std::pair<std::string, Kind>> parse_poly_binders(const SExpr& s) {
  if (!is_head(s, "forall")) fail_at(s, "expected (forall binder*)");
  std::vector<std::pair<std::string, Kind>> binders;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    const SExpr& b = expect_list(s.items[i], "(NAME kind)");
    if (b.items.size() != 2) fail_at(b, "expected (NAME kind)");
    std::string name = expect_name(b.items[0], "type variable");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::DuplicateBinder, "duplicate type variable '" + name + "'", b.span);
    const SExpr& k = expect_list(b.items[1], "kind (D|S|E)*");
    std::uint8_t bits = 0;
    for (const auto& p : k.items) {
      if (p.is_list) fail_at(p, "expected one of: D, S, E");
      if (p.atom == "D") bits |= Kind::kDiscard;
      else if (p.atom == "S") bits |= Kind::kShare;
      else if (p.atom == "E") bits |= Kind::kEscape;
      else fail_at(p, "expected one of: D, S, E");
    }
    binders.emplace_back(std::move(name), Kind{bits});
  }
  return binders;
}

void check_bound(const Type& t, const std::set<std::string>& bound, Span span) {
  std::set<std::string> vars;
  collect_type_vars(t, vars);
  for (const auto& v : vars)
    if (!bound.count(v))
      throw Error(ErrorCode::UnboundTypeVariable, "unbound type variable '" + v + "'", span);
}

void check_expr_types(const Expr& e, const std::set<std::string>& bound);

void check_expr_types(const Expr& e, const std::set<std::string>& bound) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ex::FunRef>) {
          for (const auto& t : x.type_args) check_bound(*t, bound, e.span);
        } else if constexpr (std::is_same_v<T, ex::Promote>) {
          for (const auto& a : x.target) check_bound(*a.type, bound, e.span);
        }
      },
      e.node);
  // Recurse over all children.
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        auto rec = [&](const ExprRef& c) { check_expr_types(*c, bound); };
        if constexpr (std::is_same_v<T, ex::PrimOpE>) {
          for (const auto& a : x.args) rec(a);
        } else if constexpr (std::is_same_v<T, ex::App>) {
          rec(x.fn);
          rec(x.arg);
        } else if constexpr (std::is_same_v<T, ex::Let> || std::is_same_v<T, ex::LetBang>) {
          rec(x.bound);
          rec(x.body);
        } else if constexpr (std::is_same_v<T, ex::If>) {
          rec(x.cond);
          rec(x.then_branch);
          rec(x.else_branch);
        } else if constexpr (std::is_same_v<T, ex::Cast> || std::is_same_v<T, ex::Promote> ||
                             std::is_same_v<T, ex::Esac> || std::is_same_v<T, ex::Con>) {
          rec(x.operand);
        } else if constexpr (std::is_same_v<T, ex::Case>) {
          rec(x.scrutinee);
          rec(x.match_body);
          rec(x.else_body);
        } else if constexpr (std::is_same_v<T, ex::Struct>) {
          for (const auto& f : x.fields) rec(f.second);
        } else if constexpr (std::is_same_v<T, ex::Member>) {
          rec(x.record);
        } else if constexpr (std::is_same_v<T, ex::Put>) {
          rec(x.record);
          rec(x.value);
        } else if constexpr (std::is_same_v<T, ex::Take>) {
          rec(x.record);
          rec(x.body);
        } else if constexpr (std::is_same_v<T, ex::Match>) {
          rec(x.scrutinee);
          for (const auto& a : x.arms) rec(a.body);
        }
      },
      e.node);
}

Def parse_def(const SExpr& s) {
  if (is_head(s, "def")) {
    expect_arity(s, 4, "def");
    std::string name = expect_name(s.items[1], "function name");
    auto binders = parse_poly_binders(s.items[2]);
    const SExpr& fn = s.items[3];
    if (!is_head(fn, "fn") || fn.items.size() != 4) fail_at(fn, "expected (fn (NAME type) type expr)");
    const SExpr& param = expect_list(fn.items[1], "(NAME type)");
    if (param.items.size() != 2) fail_at(param, "expected (NAME type)");
    std::string pname = expect_name(param.items[0], "parameter");
    TypeRef ptype = parse_type_s(param.items[1]);
    TypeRef rtype = parse_type_s(fn.items[2]);
    ExprRef body = parse_expr_s(fn.items[3]);
    std::set<std::string> bound;
    for (const auto& b : binders) bound.insert(b.first);
    check_bound(*ptype, bound, param.span);
    check_bound(*rtype, bound, fn.items[2].span);
    check_expr_types(*body, bound);
    PolyType sig{std::move(binders), t_fun(std::move(ptype), std::move(rtype))};
    return Def{FunDef{std::move(name), std::move(sig), std::move(pname), std::move(body)}, s.span};
  }
  if (is_head(s, "absdef")) {
    if (s.items.size() != 4 && s.items.size() != 5) fail_at(s, "expected (absdef NAME poly type [instance])");
    std::string name = expect_name(s.items[1], "function name");
    auto binders = parse_poly_binders(s.items[2]);
    TypeRef ty = parse_type_s(s.items[3]);
    if (!ty->is<TFun>()) fail_at(s.items[3], "abstract function signature must be a (fun ...) type");
    std::set<std::string> bound;
    for (const auto& b : binders) bound.insert(b.first);
    check_bound(*ty, bound, s.items[3].span);
    AbsFunDecl decl{std::move(name), PolyType{std::move(binders), std::move(ty)}, std::nullopt};
    if (s.items.size() == 5) {
      const SExpr& inst = s.items[4];
      if (!is_head(inst, "instance") || inst.items.size() < 2)
        fail_at(inst, "expected (instance NAME type*)");
      AbsInstance ai{expect_name(inst.items[1], "function name"), {}};
      for (std::size_t i = 2; i < inst.items.size(); ++i) {
        ai.type_args.push_back(parse_type_s(inst.items[i]));
        check_bound(*ai.type_args.back(), {}, inst.items[i].span);
      }
      decl.instance_of = std::move(ai);
    }
    return Def{std::move(decl), s.span};
  }
  fail_at(s, "expected one of: (def ...), (absdef ...)");
}

// ---------------------------------------------------------------------------
// Printer

class Printer {
 public:
  std::string str() const { return os_.str(); }

  void expr(const Expr& e, int indent) {
    std::visit([&](const auto& x) { print(x, indent); }, e.node);
  }

  void def(const Def& d) {
    const PolyType& sig = d.signature();
    if (const FunDef* f = d.fun()) {
      os_ << "(def " << f->name << ' ';
      binders(sig);
      os_ << "\n  (fn (" << f->param << ' ' << type_to_string(sig.fun().arg) << ") "
          << type_to_string(sig.fun().result) << "\n    ";
      expr(*f->body, 4);
      os_ << "))\n";
    } else {
      const AbsFunDecl& a = *d.abs();
      os_ << "(absdef " << a.name << ' ';
      binders(sig);
      os_ << ' ' << type_to_string(sig.body);
      if (a.instance_of) {
        os_ << " (instance " << a.instance_of->name;
        for (const auto& t : a.instance_of->type_args) os_ << ' ' << type_to_string(t);
        os_ << ')';
      }
      os_ << ")\n";
    }
  }

 private:
  void binders(const PolyType& sig) {
    os_ << "(forall";
    for (const auto& [name, kind] : sig.binders) {
      os_ << " (" << name << " (";
      const std::string k = kind.to_string();
      for (std::size_t i = 0; i < k.size(); ++i) os_ << (i ? " " : "") << k[i];
      os_ << "))";
    }
    os_ << ')';
  }

  void nl(int indent) { os_ << '\n' << std::string(static_cast<std::size_t>(indent), ' '); }

  void print(const ex::Var& x, int) { os_ << x.name; }
  void print(const ex::Unit&, int) { os_ << "unit"; }
  void print(const ex::Lit& x, int) {
    if (x.type == PrimType::Bool) os_ << (x.value ? "true" : "false");
    else os_ << x.value << prim_name(x.type);
  }
  void print(const ex::FunRef& x, int) {
    os_ << "(funref " << x.name;
    for (const auto& t : x.type_args) os_ << ' ' << type_to_string(t);
    os_ << ')';
  }
  void print(const ex::PrimOpE& x, int indent) {
    os_ << "(op " << primop_name(x.op);
    for (const auto& a : x.args) {
      os_ << ' ';
      expr(*a, indent);
    }
    os_ << ')';
  }
  void print(const ex::App& x, int indent) {
    os_ << "(app ";
    expr(*x.fn, indent);
    os_ << ' ';
    expr(*x.arg, indent);
    os_ << ')';
  }
  void print(const ex::Let& x, int indent) {
    os_ << "(let " << x.name << ' ';
    expr(*x.bound, indent + 2);
    nl(indent + 2);
    expr(*x.body, indent + 2);
    os_ << ')';
  }
  void print(const ex::LetBang& x, int indent) {
    os_ << "(letbang (";
    for (std::size_t i = 0; i < x.observed.size(); ++i) os_ << (i ? " " : "") << x.observed[i];
    os_ << ") " << x.name << ' ';
    expr(*x.bound, indent + 2);
    nl(indent + 2);
    expr(*x.body, indent + 2);
    os_ << ')';
  }
  void print(const ex::If& x, int indent) {
    os_ << "(if ";
    expr(*x.cond, indent + 2);
    nl(indent + 2);
    expr(*x.then_branch, indent + 2);
    nl(indent + 2);
    expr(*x.else_branch, indent + 2);
    os_ << ')';
  }
  void print(const ex::Cast& x, int indent) {
    os_ << "(cast " << prim_name(x.target) << ' ';
    expr(*x.operand, indent);
    os_ << ')';
  }
  void alts(const std::vector<Alternative>& as) {
    os_ << '(';
    for (std::size_t i = 0; i < as.size(); ++i)
      os_ << (i ? " " : "") << '(' << as[i].ctor << ' ' << type_to_string(as[i].type) << ')';
    os_ << ')';
  }
  void print(const ex::Promote& x, int indent) {
    os_ << "(promote ";
    alts(x.target);
    os_ << ' ';
    expr(*x.operand, indent);
    os_ << ')';
  }
  void print(const ex::Case& x, int indent) {
    os_ << "(case ";
    expr(*x.scrutinee, indent + 2);
    os_ << ' ' << x.ctor << ' ' << x.match_var;
    nl(indent + 2);
    expr(*x.match_body, indent + 2);
    nl(indent + 2);
    os_ << x.else_var;
    nl(indent + 2);
    expr(*x.else_body, indent + 2);
    os_ << ')';
  }
  void print(const ex::Esac& x, int indent) {
    os_ << "(esac ";
    expr(*x.operand, indent);
    os_ << ')';
  }
  void print(const ex::Con& x, int indent) {
    os_ << "(con " << x.ctor << ' ';
    expr(*x.operand, indent);
    os_ << ')';
  }
  void print(const ex::Struct& x, int indent) {
    os_ << "(struct (";
    for (std::size_t i = 0; i < x.fields.size(); ++i) {
      os_ << (i ? " " : "") << '(' << x.fields[i].first << ' ';
      expr(*x.fields[i].second, indent);
      os_ << ')';
    }
    os_ << "))";
  }
  void print(const ex::Member& x, int indent) {
    os_ << "(member ";
    expr(*x.record, indent);
    os_ << ' ' << x.field << ')';
  }
  void print(const ex::Put& x, int indent) {
    os_ << "(put ";
    expr(*x.record, indent);
    os_ << ' ' << x.field << ' ';
    expr(*x.value, indent);
    os_ << ')';
  }
  void print(const ex::Take& x, int indent) {
    os_ << "(take " << x.record_var << ' ' << x.field << ' ' << x.field_var << ' ';
    expr(*x.record, indent + 2);
    nl(indent + 2);
    expr(*x.body, indent + 2);
    os_ << ')';
  }
  void print(const ex::Match& x, int indent) {
    os_ << "(match ";
    expr(*x.scrutinee, indent + 2);
    for (const auto& arm : x.arms) {
      nl(indent + 2);
      os_ << '(' << arm.ctor << ' ' << arm.var << ' ';
      expr(*arm.body, indent + 4);
      os_ << ')';
    }
    os_ << ')';
  }

  std::ostringstream os_;
};

}  // namespace

Program parse_program(std::string_view text) {
  Reader reader(text);
  std::vector<Def> defs;
  for (const auto& s : reader.read_all()) defs.push_back(parse_def(s));
  return Program(std::move(defs));
}

TypeRef parse_type(std::string_view text) { return parse_type_s(Reader(text).read_one()); }

ExprRef parse_expr(std::string_view text) { return parse_expr_s(Reader(text).read_one()); }

std::string print_program(const Program& p) {
  Printer pr;
  for (const auto& d : p.defs()) pr.def(d);
  return pr.str();
}

std::string print_expr(const Expr& e) {
  Printer pr;
  pr.expr(e, 0);
  return pr.str();
}

}  // namespace cogent
