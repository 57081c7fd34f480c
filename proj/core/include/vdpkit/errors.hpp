#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdpkit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live over different variable spaces.
class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& m, std::size_t line, std::size_t col) {
    return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + m;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A vector field does not preserve the hypersurface {uv = f}.
class NotTangent : public Error {
 public:
  using Error::Error;
};

/// d(uv - f) vanishes at the requested point.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

/// A kernel family contains an element the owning field does not annihilate.
class KernelViolation : public Error {
 public:
  KernelViolation(std::size_t index, std::string generator)
      : Error("generator #" + std::to_string(index) + " (" + generator +
              ") is not annihilated by the field"),
        index_(index),
        generator_(std::move(generator)) {}

  std::size_t index() const noexcept { return index_; }
  const std::string& generator() const noexcept { return generator_; }

 private:
  std::size_t index_;
  std::string generator_;
};

/// One or more named conditions failed; each is listed separately.
class ConditionsFailed : public Error {
 public:
  ConditionsFailed(std::string what, std::vector<std::string> failures)
      : Error(join(what, failures)), failures_(std::move(failures)) {}

  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  static std::string join(const std::string& what, const std::vector<std::string>& fs) {
    std::string out = what + ":";
    for (const auto& f : fs) out += " [" + f + "]";
    return out;
  }

  std::vector<std::string> failures_;
};

}  // namespace vdpkit
