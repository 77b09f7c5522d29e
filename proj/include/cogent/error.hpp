#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cogent {

/// Byte offsets into the source text, half-open.
struct Span {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

enum class ErrorCode {
  // front end
  ParseError,
  DuplicateDefinition,
  DuplicateBinder,
  DuplicateConstructor,
  DuplicateField,
  UnboundTypeVariable,
  // typing
  TypeMismatch,
  ShareViolation,
  DiscardViolation,
  EscapeViolation,
  TakenFieldRead,
  ReadOnlyWrite,
  NonTotalEsac,
  UnknownConstructor,
  UnknownField,
  UnknownVariable,
  UnknownFunction,
  LiteralOutOfRange,
  ArityError,
  KindViolation,
  RecursionDetected,
  // passes
  DuplicateArm,
  EmptyMatch,
  NoEntryPoint,
  UnresolvedInstantiation,
  MissingRenameEntry,
  // evaluation
  StuckError,
  DivisionByZero,
  FuelExhausted,
  MissingAbstractImpl,
  DanglingPointer,
  DoubleFree,
  // ffi
  DuplicateRegistration,
  UnknownAbstract,
  SignatureMismatch,
  // backend
  UnsupportedConstruct,
  CompileFailure,
  OutputMismatch,
  // io
  InvalidValue,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure in the pipeline is reported through this exception; the span
/// points into the program text the failing node came from.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, Span span = {})
      : std::runtime_error(std::move(message)), code_(code), span_(span) {}

  ErrorCode code() const noexcept { return code_; }
  Span span() const noexcept { return span_; }

 private:
  ErrorCode code_;
  Span span_;
};

/// Line/column (1-based) of a byte offset.
struct LineCol {
  std::uint32_t line = 1;
  std::uint32_t col = 1;
};

LineCol line_col(std::string_view text, std::uint32_t offset);

/// `file:line:col: error[CODE]: message`
std::string format_diagnostic(std::string_view file, std::string_view text, const Error& err);

}  // namespace cogent
