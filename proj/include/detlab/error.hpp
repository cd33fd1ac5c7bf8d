#pragma once

#include <stdexcept>
#include <string>

namespace detlab {

enum class ErrorKind {
  kPrecondition,  // malformed input or violated operation precondition
  kBudget,        // enumeration would exceed the configured budget
  kIo,            // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorKind::kPrecondition, what);
}

[[noreturn]] inline void fail_budget(const std::string& what) {
  throw Error(ErrorKind::kBudget, what);
}

[[noreturn]] inline void fail_io(const std::string& what) {
  throw Error(ErrorKind::kIo, what);
}

}  // namespace detlab
