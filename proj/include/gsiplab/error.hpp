// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsiplab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point or interval evaluation failed (unknown variable, division by zero).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A structurally invalid object: empty constraint list where one is
/// required, mismatched dimensions, bad bounds.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the box it is supposed to belong to.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The branch-and-bound node budget was exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on data it does not apply to.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Syntax or validation error in a `.gsip` document. Line and column are
/// 1-based; column 0 means "the whole line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

}  // namespace gsiplab
