#pragma once

#include <stdexcept>
#include <string>

namespace fmcwsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates the invariants of the type it is used to build.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A time, index, or bin lies outside the domain of an operation.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Rasters, windows, or cubes whose dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Base of the binary-file decoding errors.
class FileFormatError : public Error {
 public:
  using Error::Error;
};

/// Wrong magic bytes.
class FormatError : public FileFormatError {
 public:
  using FileFormatError::FileFormatError;
};

/// Payload shorter or longer than the header declares.
class CorruptionError : public FileFormatError {
 public:
  using FileFormatError::FileFormatError;
};

class VersionError : public FileFormatError {
 public:
  using FileFormatError::FileFormatError;
};

/// A frame sequence is missing an index.
class GapError : public Error {
 public:
  using Error::Error;
};

/// Frames of one sequence disagree on grid dimensions or field of view.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// An angle-FFT bin maps outside [-1, 1] in sine space.
class NoPhysicalAngleError : public Error {
 public:
  using Error::Error;
};

class UnknownTargetError : public Error {
 public:
  using Error::Error;
};

class NoComparableEntriesError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem. The message always starts with the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fmcwsim
