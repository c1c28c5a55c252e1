#pragma once

#include <stdexcept>
#include <string>

namespace footsim {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  Io,
  Config,
  Numerical,
};

// Single exception type for the core; the C layer maps kind() to status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  NumericalError(long step, const std::string& what)
      : Error(ErrorKind::Numerical, "step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace footsim
