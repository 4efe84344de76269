#pragma once

#include <stdexcept>
#include <string>

namespace vigg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few points, zero total weight, or a rank-deficient cross-covariance.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class MissingNormals : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

/// No clique of the visual graph produced a usable transform.
class NoValidHypothesis : public Error {
 public:
  using Error::Error;
};

/// A matching stage produced an empty correspondence set.
class NoCorrespondences : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. The message names the file and, where
/// possible, the offending line, element or byte offset.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace vigg
