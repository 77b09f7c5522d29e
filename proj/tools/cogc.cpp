// cogc: command-line driver for the Cogent core pipeline.
//
// Exit codes: 0 success, 1 check or evaluation failure, 2 oracle or
// differential failure, 3 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cogent/codegen.hpp"
#include "cogent/eval.hpp"
#include "cogent/ffi.hpp"
#include "cogent/instance.hpp"
#include "cogent/oracle.hpp"
#include "cogent/passes.hpp"
#include "cogent/syntax.hpp"
#include "cogent/typecheck.hpp"

using namespace cogent;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kOracleFailure = 2;
constexpr int kUsage = 3;

struct Source {
  std::string path;
  std::string text;
};

/// Raised to stop with a given exit code after diagnostics were printed.
struct Exit {
  int code;
};

Source load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": error: cannot read file\n";
    throw Exit{kUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return {path, ss.str()};
}

[[noreturn]] void fail(const Source& src, const Error& e, int code = kFailure) {
  std::cerr << format_diagnostic(src.path, src.text, e) << "\n";
  throw Exit{code};
}

Program parse(const Source& src) {
  try {
    return parse_program(src.text);
  } catch (const Error& e) {
    fail(src, e);
  }
}

/// Parsed, desugared and fully checked, ready to evaluate.
Program load_checked(const Source& src) {
  try {
    Program p = desugar_program(parse(src));
    ProgramCheck pc = check_program(p);
    if (!pc.ok()) {
      for (const auto& e : pc.errors) std::cerr << format_diagnostic(src.path, src.text, e) << "\n";
      throw Exit{kFailure};
    }
    check_abstract_signatures(builtin_library(p), p);
    return p;
  } catch (const Error& e) {
    fail(src, e);
  }
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error[InvalidValue]: --arg is not valid JSON: " << e.what() << "\n";
    throw Exit{kUsage};
  }
}

std::vector<TypeRef> parse_type_args(const std::vector<std::string>& texts) {
  std::vector<TypeRef> out;
  for (const auto& t : texts) out.push_back(parse_type(t));
  return out;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump() << "\n"; }

/// Records function entries and FFI calls, with store snapshots under the
/// update semantics.
class CallTracer : public Tracer {
 public:
  explicit CallTracer(const Instantiator& inst) : inst_(inst) {}

  void enter(const Expr& e, const Env&, const Store* store) override {
    const Instance* fn = inst_.by_body(&e);
    stack_.push_back(fn);
    if (!fn) return;
    nlohmann::json ev = {{"enter", fn->name}};
    if (store) ev["store"] = store_to_json(*store);
    events.push_back(std::move(ev));
  }
  void leave(const Value& v, const Store* store) override {
    const Instance* fn = stack_.back();
    stack_.pop_back();
    if (!fn) return;
    nlohmann::json ev = {{"leave", fn->name}, {"value", value_to_json(v)}};
    if (store) ev["store"] = store_to_json(*store);
    events.push_back(std::move(ev));
  }
  void enter_ffi(const std::string& name, const std::vector<TypeRef>&, const Value& arg, const Store* store) override {
    nlohmann::json ev = {{"ffi", name}, {"arg", value_to_json(arg)}};
    if (store) ev["store"] = store_to_json(*store);
    events.push_back(std::move(ev));
  }
  void leave_ffi(const Value& v, const Store* store) override {
    nlohmann::json ev = {{"ffi_return", value_to_json(v)}};
    if (store) ev["store"] = store_to_json(*store);
    events.push_back(std::move(ev));
  }

  nlohmann::json events = nlohmann::json::array();

 private:
  const Instantiator& inst_;
  std::vector<const Instance*> stack_;
};

// ---------------------------------------------------------------------------

int cmd_check(const std::string& file, const std::string& tree_out) {
  const Source src = load(file);
  Program p;
  ProgramCheck pc;
  try {
    p = desugar_program(parse(src));
    pc = check_program(p);
    if (pc.ok()) check_abstract_signatures(builtin_library(p), p);
  } catch (const Error& e) {
    fail(src, e);
  }
  for (const auto& e : pc.errors) std::cerr << format_diagnostic(src.path, src.text, e) << "\n";
  if (!pc.ok()) return kFailure;
  if (!tree_out.empty()) {
    nlohmann::json trees = nlohmann::json::object();
    for (const auto& [name, tree] : pc.trees) trees[name] = typing_tree_to_json(tree);
    std::ofstream out(tree_out, std::ios::binary);
    if (!out) {
      std::cerr << tree_out << ": error: cannot write file\n";
      return kUsage;
    }
    out << trees.dump(2) << "\n";
  }
  std::cout << file << ": ok\n";
  return kOk;
}

int cmd_run(const std::string& file, const std::string& fn, const std::string& sem, const std::string& arg,
            const std::vector<std::string>& targs, bool trace) {
  const Source src = load(file);
  const Program p = load_checked(src);
  const nlohmann::json j = parse_json(arg);
  try {
    const Registry registry = builtin_library(p);
    Instantiator inst(p);
    const std::vector<TypeRef> type_args = parse_type_args(targs);
    const Instance& entry = inst.get(fn, type_args);
    const Value v = value_from_json(j, entry.param_type, inst.resolver());
    CallTracer tracer(inst);
    EvalOptions opts;
    if (trace) opts.tracer = &tracer;
    nlohmann::json out;
    if (sem == "value") {
      ValueInterpreter interp(p, registry, inst, opts);
      out = value_to_json(interp.apply_fn(fn, type_args, v));
      if (trace) out = {{"value", out}, {"trace", tracer.events}};
    } else {
      Store store;
      const Value u = lift_value(v, entry.param_type, store, registry);
      UpdateInterpreter interp(p, registry, inst, opts);
      const Value r = interp.apply_fn(fn, type_args, u, store);
      out = {{"value", value_to_json(r)}, {"store", store_to_json(store)}};
      if (trace) out["trace"] = tracer.events;
    }
    print_json(out);
    return kOk;
  } catch (const Error& e) {
    fail(src, e);
  }
}

int cmd_oracle(const std::string& file, const std::string& fn, const std::string& arg, std::size_t random,
               std::uint64_t seed, std::size_t jobs) {
  const Source src = load(file);
  const Program p = load_checked(src);
  try {
    const Registry registry = builtin_library(p);
    OracleOptions opts;
    opts.jobs = jobs;
    if (random > 0) {
      const auto verdicts = random_oracle_runs(p, registry, fn, random, seed, opts);
      std::size_t passed = 0;
      nlohmann::json all = nlohmann::json::array();
      for (const auto& v : verdicts) {
        passed += v.pass;
        all.push_back(v.to_json());
      }
      print_json({{"runs", verdicts.size()}, {"passed", passed}, {"verdicts", std::move(all)}});
      return passed == verdicts.size() ? kOk : kOracleFailure;
    }
    Instantiator inst(p);
    const Instance& entry = inst.get(fn, {});
    const Value v = value_from_json(parse_json(arg), entry.param_type, inst.resolver());
    Store store;
    const Value u = lift_value(v, entry.param_type, store, registry);
    const OracleVerdict verdict = refinement_oracle(p, registry, fn, {}, v, u, store, opts);
    print_json(verdict.to_json());
    return verdict.pass ? kOk : kOracleFailure;
  } catch (const Error& e) {
    fail(src, e);
  }
}

int cmd_mono(const std::string& file, const std::vector<std::string>& entries, const std::string& renames_out) {
  const Source src = load(file);
  const Program p = load_checked(src);
  try {
    const MonoResult m = monomorphise(p, entries);
    std::cout << print_program(m.program);
    if (!renames_out.empty()) std::ofstream(renames_out, std::ios::binary) << m.renames.to_json().dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    fail(src, e);
  }
}

int cmd_anf(const std::string& file) {
  const Source src = load(file);
  const Program p = load_checked(src);
  std::cout << print_program(a_normalise(p));
  return kOk;
}

int cmd_desugar(const std::string& file) {
  const Source src = load(file);
  try {
    std::cout << print_program(desugar_program(parse(src)));
  } catch (const Error& e) {
    fail(src, e);
  }
  return kOk;
}

int cmd_emit_c(const std::string& file, const std::string& dir, const std::string& fn) {
  const Source src = load(file);
  const Program p = load_checked(src);
  try {
    const std::string stem = std::filesystem::path(file).stem().string();
    MonoResult m = monomorphise(p, fn.empty() ? std::vector<std::string>{} : std::vector<std::string>{fn});
    const Program anf = a_normalise(m.program);
    std::optional<std::string> entry;
    if (!fn.empty()) entry = m.renames.lookup(fn, {});
    for (const auto& path : write_c_files(anf, dir, stem, entry)) std::cout << path << "\n";
    return kOk;
  } catch (const Error& e) {
    fail(src, e);
  }
}

int cmd_diff_c(const std::string& file, const std::string& fn, const std::string& arg, std::size_t random,
               std::uint64_t seed) {
  const Source src = load(file);
  const Program p = load_checked(src);
  try {
    std::vector<Value> inputs;
    Instantiator inst(p);
    const Instance& entry = inst.get(fn, {});
    if (random > 0) {
      const Registry registry = builtin_library(p);
      ValueGenerator gen(p, registry, inst, seed);
      for (std::size_t i = 0; i < random; ++i)
        if (auto v = gen.generate(entry.param_type)) inputs.push_back(*v);
    } else {
      inputs.push_back(value_from_json(parse_json(arg), entry.param_type, inst.resolver()));
    }
    const DiffVerdict verdict = diff_run_c(p, fn, inputs);
    print_json(verdict.to_json());
    if (verdict.status == "FAIL") {
      for (const auto& c : verdict.cases)
        if (!c.match) std::cerr << file << ": error[OutputMismatch]: C output differs at '" << c.path << "'\n";
      return kOracleFailure;
    }
    return kOk;
  } catch (const Error& e) {
    fail(src, e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cogent core toolchain: type checking, both semantics, refinement oracle, passes and C emission"};
  app.require_subcommand(1);

  std::string file, fn, sem = "value", arg, tree_out, dir, renames_out;
  std::vector<std::string> targs, entries;
  bool trace = false;
  std::size_t random = 0, jobs = 1;
  std::uint64_t seed = 0;

  auto* check = app.add_subcommand("check", "type-check a program");
  check->add_option("FILE", file)->required();
  check->add_option("--typing-tree", tree_out, "write typing derivations as JSON");

  auto* run = app.add_subcommand("run", "evaluate a function");
  run->add_option("FILE", file)->required();
  run->add_option("--fn", fn)->required();
  run->add_option("--sem", sem)->check(CLI::IsMember({"value", "update"}));
  run->add_option("--arg", arg)->required();
  run->add_option("--type-arg", targs, "type argument for a polymorphic function");
  run->add_flag("--trace", trace, "record calls with store dumps");

  auto* oracle = app.add_subcommand("oracle", "run the refinement oracle");
  oracle->add_option("FILE", file)->required();
  oracle->add_option("--fn", fn)->required();
  auto* oracle_arg = oracle->add_option("--arg", arg);
  auto* oracle_random = oracle->add_option("--random", random, "number of generated inputs");
  oracle_arg->excludes(oracle_random);
  oracle->add_option("--seed", seed);
  oracle->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* mono = app.add_subcommand("mono", "monomorphise and print the program");
  mono->add_option("FILE", file)->required();
  mono->add_option("--entry", entries);
  mono->add_option("--renames", renames_out, "write the rename map as JSON");

  auto* anf = app.add_subcommand("anf", "A-normalise and print the program");
  anf->add_option("FILE", file)->required();

  auto* desugar = app.add_subcommand("desugar", "desugar match and print the program");
  desugar->add_option("FILE", file)->required();

  auto* emit = app.add_subcommand("emit-c", "write C code for the program");
  emit->add_option("FILE", file)->required();
  emit->add_option("-o", dir)->required();
  emit->add_option("--fn", fn, "also write a driver for this entry point");

  auto* diff = app.add_subcommand("diff-c", "compare compiled C against the update semantics");
  diff->add_option("FILE", file)->required();
  diff->add_option("--fn", fn)->required();
  auto* diff_arg = diff->add_option("--arg", arg);
  auto* diff_random = diff->add_option("--random", random);
  diff_arg->excludes(diff_random);
  diff->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(file, tree_out);
    if (*run) return cmd_run(file, fn, sem, arg, targs, trace);
    if (*oracle) {
      if (arg.empty() && random == 0) {
        std::cerr << "oracle: one of --arg or --random is required\n";
        return kUsage;
      }
      return cmd_oracle(file, fn, arg, random, seed, jobs);
    }
    if (*mono) return cmd_mono(file, entries, renames_out);
    if (*anf) return cmd_anf(file);
    if (*desugar) return cmd_desugar(file);
    if (*emit) return cmd_emit_c(file, dir, fn);
    if (*diff) {
      if (arg.empty() && random == 0) {
        std::cerr << "diff-c: one of --arg or --random is required\n";
        return kUsage;
      }
      return cmd_diff_c(file, fn, arg, random, seed);
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kUsage;
}
