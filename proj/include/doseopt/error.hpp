#pragma once

#include <stdexcept>
#include <string>

namespace doseopt {

enum class ErrorKind {
  InvalidArgument,  // bad user input or violated precondition
  Parse,            // malformed file contents
  Io,               // file missing or unwritable
  Numeric,          // non-finite values or unstable integration
};

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

}  // namespace doseopt
