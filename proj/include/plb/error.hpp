#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plb {

enum class ErrorKind {
  Syntax,
  DirectiveUnsupported,
  Existence,       // unknown predicate
  Instantiation,   // unbound variable where a value is required
  Type,
  Evaluation,      // division by zero and friends
  Overflow,        // 64-bit integer overflow
  StepBudget,
  Cycle,           // deref or unify budget exceeded on a cyclic binding
  Permission,      // builtin redefinition
  Resource,
  Boundary,        // host <-> engine conversion failure
};

std::string_view to_string(ErrorKind kind);

struct SourcePos {
  std::uint32_t line = 0;  // 1-based; 0 means "no position"
  std::uint32_t column = 0;
  std::uint32_t offset = 0;
};

/// Every failure raised by the engine is one of these. Parse errors carry a
/// source position; the bridge re-raises them as BoundaryError with goal text.
class PrologError : public std::runtime_error {
 public:
  PrologError(ErrorKind kind, const std::string& message, SourcePos pos = {});

  ErrorKind kind() const noexcept { return kind_; }
  const SourcePos& pos() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string detail_;
};

}  // namespace plb
