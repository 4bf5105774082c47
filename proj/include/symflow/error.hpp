#pragma once

#include <stdexcept>
#include <string>

namespace symflow {

enum class ErrorKind {
  InvalidArgument,
  InvalidState,  // SPD / positivity / pole regularity
  Config,
  Numerical,
  Io,
};

/// Exception carried through the core. The C API maps `kind` onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace symflow
