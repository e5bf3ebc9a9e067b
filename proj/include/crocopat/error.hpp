#pragma once

#include <stdexcept>
#include <string>

namespace crocopat {

/// Line/column in program or RSF text, 1-based. Line 0 means "unknown".
struct Position {
  int line = 0;
  int column = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Base of every diagnostic the tool reports before exiting with status 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message, Position pos = {})
      : std::runtime_error(message), pos_(pos) {}

  Position position() const { return pos_; }

 private:
  Position pos_;
};

class RsfError : public Error {
  using Error::Error;
};

/// Lexical or syntax error.
class SyntaxError : public Error {
  using Error::Error;
};

/// Violated context condition (kinds, free attributes, ...).
class StaticError : public Error {
  using Error::Error;
};

class RuntimeError : public Error {
  using Error::Error;
};

}  // namespace crocopat
