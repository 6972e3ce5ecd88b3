// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace psoa {

enum class Severity { Warning, Error };

struct ParseDiagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  Severity severity = Severity::Error;

  std::string to_string() const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  explicit ParseError(ParseDiagnostic d) : Error(d.to_string()), diagnostic_(std::move(d)) {}
  const ParseDiagnostic& diagnostic() const { return diagnostic_; }

 private:
  ParseDiagnostic diagnostic_;
};

// Raised by transformation stages (unsupported constructs, non-ground ##).
class TransformError : public Error {
 public:
  using Error::Error;
};

// Raised by runtime conversion and the Prolog/TPTP emitters.
class ConversionError : public Error {
 public:
  using Error::Error;
};

class EngineError : public Error {
 public:
  enum class Kind { Instantiation, Type, UnknownBuiltin, Resource };
  EngineError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace psoa
