#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aridem {

enum class ErrorKind {
  kProgramConstruction,  // malformed program or relation
  kOverflow,             // 64-bit signed arithmetic overflow
  kDuplicateOperand,     // second arrival for an occupied join slot
  kDuplicateElement,     // (identifier, indices) already live
  kDuplicateResult,      // sink saw the same result index twice
  kDeadlockedJoin,       // partial elements left at quiescence
  kEventLimit,           // simulator event ceiling exceeded
  kInvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kProgramConstruction: return "program construction error";
    case ErrorKind::kOverflow: return "arithmetic overflow";
    case ErrorKind::kDuplicateOperand: return "duplicate operand";
    case ErrorKind::kDuplicateElement: return "duplicate element";
    case ErrorKind::kDuplicateResult: return "duplicate result";
    case ErrorKind::kDeadlockedJoin: return "deadlocked join";
    case ErrorKind::kEventLimit: return "event limit exceeded";
    case ErrorKind::kInvalidArgument: return "invalid argument";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace aridem
