#pragma once

#include "pbench/codegen/emit_c.hpp"
#include "pbench/codegen/interpreter.hpp"
#include "pbench/codegen/scan.hpp"
#include "pbench/iset/script.hpp"

namespace pbench {

inline LoopAst codegen(const Value &v, const BasicSet *context = nullptr) {
  if (is_map(v))
    return codegen_map(std::get<UMap>(v), context);
  return codegen_set(std::get<USet>(v), context);
}

/// parse -> evaluate -> normalize -> scan.
inline LoopAst codegen_script(std::string_view text, const BasicSet *context = nullptr) {
  return codegen(evaluate(parse_script(text)), context);
}

} // namespace pbench
