#include "cogent/error.hpp"

#include <sstream>

namespace cogent {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorCode::DuplicateBinder: return "DuplicateBinder";
    case ErrorCode::DuplicateConstructor: return "DuplicateConstructor";
    case ErrorCode::DuplicateField: return "DuplicateField";
    case ErrorCode::UnboundTypeVariable: return "UnboundTypeVariable";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::ShareViolation: return "ShareViolation";
    case ErrorCode::DiscardViolation: return "DiscardViolation";
    case ErrorCode::EscapeViolation: return "EscapeViolation";
    case ErrorCode::TakenFieldRead: return "TakenFieldRead";
    case ErrorCode::ReadOnlyWrite: return "ReadOnlyWrite";
    case ErrorCode::NonTotalEsac: return "NonTotalEsac";
    case ErrorCode::UnknownConstructor: return "UnknownConstructor";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::LiteralOutOfRange: return "LiteralOutOfRange";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::RecursionDetected: return "RecursionDetected";
    case ErrorCode::DuplicateArm: return "DuplicateArm";
    case ErrorCode::EmptyMatch: return "EmptyMatch";
    case ErrorCode::NoEntryPoint: return "NoEntryPoint";
    case ErrorCode::UnresolvedInstantiation: return "UnresolvedInstantiation";
    case ErrorCode::MissingRenameEntry: return "MissingRenameEntry";
    case ErrorCode::StuckError: return "StuckError";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::MissingAbstractImpl: return "MissingAbstractImpl";
    case ErrorCode::DanglingPointer: return "DanglingPointer";
    case ErrorCode::DoubleFree: return "DoubleFree";
    case ErrorCode::DuplicateRegistration: return "DuplicateRegistration";
    case ErrorCode::UnknownAbstract: return "UnknownAbstract";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::CompileFailure: return "CompileFailure";
    case ErrorCode::OutputMismatch: return "OutputMismatch";
    case ErrorCode::InvalidValue: return "InvalidValue";
  }
  return "Unknown";
}

LineCol line_col(std::string_view text, std::uint32_t offset) {
  LineCol lc;
  for (std::uint32_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.col = 1;
    } else {
      ++lc.col;
    }
  }
  return lc;
}

std::string format_diagnostic(std::string_view file, std::string_view text, const Error& err) {
  const LineCol lc = line_col(text, err.span().start);
  std::ostringstream os;
  os << file << ':' << lc.line << ':' << lc.col << ": error[" << error_code_name(err.code())
     << "]: " << err.what();
  return os.str();
}

}  // namespace cogent
