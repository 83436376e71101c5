#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbench {

enum class Errc {
  // iset-core
  SyntaxError,
  UnknownIdentifier,
  ArityMismatch,
  NonEliminableExistential,
  SpaceMismatch,
  NotInvertibleAsSchedule,
  UnboundedSet,
  UnboundParameter,
  Overflow,
  // scan-codegen
  UnboundedDimension,
  UnsupportedUnionShape,
  UnknownStatement,
  // pattern-spec
  MissingFile,
  MissingValidation,
  DanglingReference,
  PatternParseError,
  // transforms
  NotAPermutation,
  BadTileSize,
  UnsupportedArity,
  // driver
  TemplateLayoutMismatch,
  CompilerNotFound,
  CompileFailed,
  // harness
  FootprintTooSmall,
  DriverCrashed,
  ProtocolParseError,
  IoError,
  InvalidConfig,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
  case Errc::SyntaxError: return "SyntaxError";
  case Errc::UnknownIdentifier: return "UnknownIdentifier";
  case Errc::ArityMismatch: return "ArityMismatch";
  case Errc::NonEliminableExistential: return "NonEliminableExistential";
  case Errc::SpaceMismatch: return "SpaceMismatch";
  case Errc::NotInvertibleAsSchedule: return "NotInvertibleAsSchedule";
  case Errc::UnboundedSet: return "UnboundedSet";
  case Errc::UnboundParameter: return "UnboundParameter";
  case Errc::Overflow: return "Overflow";
  case Errc::UnboundedDimension: return "UnboundedDimension";
  case Errc::UnsupportedUnionShape: return "UnsupportedUnionShape";
  case Errc::UnknownStatement: return "UnknownStatement";
  case Errc::MissingFile: return "MissingFile";
  case Errc::MissingValidation: return "MissingValidation";
  case Errc::DanglingReference: return "DanglingReference";
  case Errc::PatternParseError: return "PatternParseError";
  case Errc::NotAPermutation: return "NotAPermutation";
  case Errc::BadTileSize: return "BadTileSize";
  case Errc::UnsupportedArity: return "UnsupportedArity";
  case Errc::TemplateLayoutMismatch: return "TemplateLayoutMismatch";
  case Errc::CompilerNotFound: return "CompilerNotFound";
  case Errc::CompileFailed: return "CompileFailed";
  case Errc::FootprintTooSmall: return "FootprintTooSmall";
  case Errc::DriverCrashed: return "DriverCrashed";
  case Errc::ProtocolParseError: return "ProtocolParseError";
  case Errc::IoError: return "IoError";
  case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Module that owns an error code; used to tag CLI diagnostics.
constexpr std::string_view errc_module(Errc e) {
  switch (e) {
  case Errc::SyntaxError:
  case Errc::UnknownIdentifier:
  case Errc::ArityMismatch:
  case Errc::NonEliminableExistential:
  case Errc::SpaceMismatch:
  case Errc::NotInvertibleAsSchedule:
  case Errc::UnboundedSet:
  case Errc::UnboundParameter:
  case Errc::Overflow:
    return "iset";
  case Errc::UnboundedDimension:
  case Errc::UnsupportedUnionShape:
  case Errc::UnknownStatement:
    return "codegen";
  case Errc::MissingFile:
  case Errc::MissingValidation:
  case Errc::DanglingReference:
  case Errc::PatternParseError:
    return "pattern";
  case Errc::NotAPermutation:
  case Errc::BadTileSize:
  case Errc::UnsupportedArity:
    return "transforms";
  case Errc::TemplateLayoutMismatch:
  case Errc::CompilerNotFound:
  case Errc::CompileFailed:
    return "driver";
  case Errc::FootprintTooSmall:
  case Errc::DriverCrashed:
  case Errc::ProtocolParseError:
  case Errc::IoError:
  case Errc::InvalidConfig:
    return "harness";
  }
  return "unknown";
}

struct SourceLoc {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &message,
        std::optional<SourceLoc> loc = std::nullopt)
      : std::runtime_error(format(code, message, loc)), code_(code),
        loc_(loc) {}

  Errc code() const noexcept { return code_; }
  const std::optional<SourceLoc> &location() const noexcept { return loc_; }

private:
  static std::string format(Errc code, const std::string &message,
                            const std::optional<SourceLoc> &loc) {
    std::string out(errc_name(code));
    if (loc)
      out += " at " + std::to_string(loc->line) + ":" +
             std::to_string(loc->column);
    out += ": ";
    out += message;
    return out;
  }

  Errc code_;
  std::optional<SourceLoc> loc_;
};

} // namespace pbench
