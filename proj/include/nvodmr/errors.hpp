#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nvodmr {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something outside the operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (e.g. eigensolver did not converge).
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::string dump)
      : Error(what), dump_(std::move(dump)) {}
  const std::string& dump() const noexcept { return dump_; }

 private:
  std::string dump_;
};

// Spectral features needed for electrometry could not be found.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Field geometry does not support the requested measurement scheme.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Input file does not follow the expected schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-fatal diagnostics collected alongside results.
using Warnings = std::vector<std::string>;

}  // namespace nvodmr
