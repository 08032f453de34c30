#pragma once

#include <stdexcept>
#include <string>

namespace housedyn {

enum class ErrorKind {
  kParse,       // malformed input file content
  kValidation,  // well-formed input violating a data invariant
  kDomain,      // argument outside the mathematical domain of an operation
  kNumerical,   // integration blow-up or other numerical failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace housedyn
