// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the cogent_core package.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cogent/codegen.hpp"
#include "cogent/error.hpp"
#include "cogent/eval.hpp"
#include "cogent/ffi.hpp"
#include "cogent/instance.hpp"
#include "cogent/kinding.hpp"
#include "cogent/oracle.hpp"
#include "cogent/passes.hpp"
#include "cogent/syntax.hpp"
#include "cogent/typecheck.hpp"

namespace py = pybind11;
using namespace cogent;

namespace {

constexpr const char* kInput = "<input>";

/// Carries the source text so errors can be rendered as diagnostics.
struct SourceError {
  std::string text;
  Error error;
};

template <class F>
auto with_source(const std::string& text, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw SourceError{text, e};
  }
}

Program checked(const std::string& text) {
  Program p = desugar_program(parse_program(text));
  require_well_typed(p);
  check_abstract_signatures(builtin_library(p), p);
  return p;
}

std::vector<TypeRef> type_args_of(const std::vector<std::string>& texts) {
  std::vector<TypeRef> out;
  for (const auto& t : texts) out.push_back(parse_type(t));
  return out;
}

std::string check(const std::string& text) {
  return with_source(text, [&] {
    const Program p = desugar_program(parse_program(text));
    const ProgramCheck pc = check_program(p);
    if (!pc.ok()) throw pc.errors.front();
    check_abstract_signatures(builtin_library(p), p);
    nlohmann::json trees = nlohmann::json::object();
    for (const auto& [name, tree] : pc.trees) trees[name] = typing_tree_to_json(tree);
    return trees.dump();
  });
}

std::string run(const std::string& text, const std::string& fn, const std::string& arg, const std::string& sem,
                const std::vector<std::string>& targs) {
  if (sem != "value" && sem != "update") throw py::value_error("semantics must be 'value' or 'update'");
  return with_source(text, [&] {
    const Program p = checked(text);
    const Registry registry = builtin_library(p);
    Instantiator inst(p);
    const std::vector<TypeRef> type_args = type_args_of(targs);
    const Instance& entry = inst.get(fn, type_args);
    const Value v = value_from_json(nlohmann::json::parse(arg), entry.param_type, inst.resolver());
    if (sem == "value") return value_to_json(ValueInterpreter(p, registry, inst, {}).apply_fn(fn, type_args, v)).dump();
    Store store;
    const Value u = lift_value(v, entry.param_type, store, registry);
    const Value r = UpdateInterpreter(p, registry, inst, {}).apply_fn(fn, type_args, u, store);
    return nlohmann::json{{"value", value_to_json(r)}, {"store", store_to_json(store)}}.dump();
  });
}

std::string oracle(const std::string& text, const std::string& fn, std::size_t count, std::uint64_t seed) {
  return with_source(text, [&] {
    const Program p = checked(text);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : random_oracle_runs(p, builtin_library(p), fn, count, seed)) out.push_back(v.to_json());
    return out.dump();
  });
}

std::string desugar(const std::string& text) {
  return with_source(text, [&] { return print_program(desugar_program(parse_program(text))); });
}

std::string anf(const std::string& text) {
  return with_source(text, [&] { return print_program(a_normalise(checked(text))); });
}

py::tuple mono(const std::string& text, const std::vector<std::string>& entries) {
  return with_source(text, [&] {
    const MonoResult m = monomorphise(checked(text), entries);
    return py::make_tuple(print_program(m.program), m.renames.to_json().dump());
  });
}

py::dict emit(const std::string& text, const std::string& stem) {
  return with_source(text, [&] {
    const Program m = a_normalise(monomorphise(checked(text)).program);
    const CEmission c = emit_c(m, stem);
    py::dict d;
    d["header"] = c.header;
    d["source"] = c.source;
    return d;
  });
}

std::string max_kind_of(const std::string& type_text, const std::map<std::string, std::string>& delta) {
  std::vector<std::pair<std::string, Kind>> bindings;
  for (const auto& [name, letters] : delta) {
    std::uint8_t bits = 0;
    for (char c : letters) {
      if (c == 'D') bits |= Kind::kDiscard;
      else if (c == 'S') bits |= Kind::kShare;
      else if (c == 'E') bits |= Kind::kEscape;
      else throw py::value_error("kind letters are D, S and E");
    }
    bindings.emplace_back(name, Kind(bits));
  }
  return with_source(type_text, [&] { return max_kind(KindContext(bindings), *parse_type(type_text)).to_string(); });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings to the cogent core library";
  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SourceError& e) {
      const py::tuple args = py::make_tuple(std::string(error_code_name(e.error.code())),
                                            format_diagnostic(kInput, e.text, e.error), std::string(e.error.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    } catch (const Error& e) {
      const py::tuple args =
          py::make_tuple(std::string(error_code_name(e.code())), std::string(e.what()), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("check", &check, py::arg("source"));
  m.def("run", &run, py::arg("source"), py::arg("fn"), py::arg("arg"), py::arg("semantics"),
        py::arg("type_args"));
  m.def("oracle", &oracle, py::arg("source"), py::arg("fn"), py::arg("count"), py::arg("seed"));
  m.def("desugar", &desugar, py::arg("source"));
  m.def("anf", &anf, py::arg("source"));
  m.def("mono", &mono, py::arg("source"), py::arg("entries"));
  m.def("emit_c", &emit, py::arg("source"), py::arg("stem"));
  m.def("max_kind", &max_kind_of, py::arg("type"), py::arg("delta"));
  m.def("find_c_compiler", &find_c_compiler);
}
