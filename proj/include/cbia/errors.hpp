#pragma once

#include <stdexcept>
#include <string>

namespace cbia {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A problem, scheme or schedule violates one of its structural invariants.
class InvalidProblem : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON document. `field()` names the offending member.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error("parse error at '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A scheme was paired with a problem it was not built for.
class MismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

}  // namespace cbia
