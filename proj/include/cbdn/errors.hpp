#pragma once

#include <stdexcept>

namespace cbdn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands have incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Codeword index outside 1..M.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated, or unwritable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Not enough training data for the requested codebook size.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Two codewords coincide where distinct codewords are required.
class DegenerateCodewordsError : public Error {
 public:
  using Error::Error;
};

/// A pixel is covered by no patch during reassembly.
class CoverageError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbdn
