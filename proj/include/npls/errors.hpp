#pragma once

#include <stdexcept>
#include <string>

namespace npls {

// Base for everything thrown by the library. `code` is a stable,
// machine-checkable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class SolveError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class EngineError : public Error {
 public:
  using Error::Error;
};

class RuntimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace npls
