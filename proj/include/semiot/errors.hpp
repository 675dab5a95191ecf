#pragma once

#include <stdexcept>
#include <string>

namespace semiot {

/// Precondition violated by the caller (bad index, bad shape, bad config value).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear solve or update produced non-finite numbers.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The g* oracle could not reach the requested target residual.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested operation is not defined for the configured mode.
class UnsupportedMode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or unreadable input document (instance, config, spec).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CorruptCheckpoint : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace semiot
