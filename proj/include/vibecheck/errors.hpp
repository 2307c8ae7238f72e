#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vibecheck {

/// Root of every error raised by the library. The category decides the CLI
/// exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- configuration -----------------------------------------------------------

class ConfigError : public Error {
 public:
  using Error::Error;
};

// --- input data --------------------------------------------------------------

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(const std::string& id) : DataError("duplicate record id \"" + id + "\""), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyDataset : public DataError {
 public:
  EmptyDataset() : DataError("dataset contains no usable records") {}
};

class TooFewRecords : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// --- providers ---------------------------------------------------------------

class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool retryable, int status = 0)
      : Error(what), retryable_(retryable), status_(status) {}

  bool retryable() const noexcept { return retryable_; }
  /// HTTP status when the failure came from a response, 0 otherwise.
  int status() const noexcept { return status_; }

 private:
  bool retryable_;
  int status_;
};

/// Missing or rejected credentials. Never retried.
class AuthError : public ProviderError {
 public:
  explicit AuthError(const std::string& what, int status = 0) : ProviderError(what, false, status) {}
};

// --- model output parsing ----------------------------------------------------

class AxisParseError : public Error {
 public:
  using Error::Error;
};

class ZeroAxesParsed : public Error {
 public:
  using Error::Error;
};

class ReduceParseError : public Error {
 public:
  using Error::Error;
};

class UnparseableVerdict : public Error {
 public:
  using Error::Error;
};

// --- numerics ----------------------------------------------------------------

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class SingleClass : public Error {
 public:
  using Error::Error;
};

// --- run quality -------------------------------------------------------------

class QualityError : public Error {
 public:
  using Error::Error;
};

class DataQualityError : public QualityError {
 public:
  using QualityError::QualityError;
};

class NoVibesSurvived : public QualityError {
 public:
  NoVibesSurvived() : QualityError("no vibe survived validation") {}
};

}  // namespace vibecheck
