#pragma once

#include <stdexcept>
#include <string>

namespace almcluster {

/// Invalid argument or violated precondition on a public operation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid model configuration (non-PSD covariance, bad levels, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Wire-level violation: unexpected kind, iteration mismatch, malformed frame.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// File or socket failure, including timeouts naming the unreachable peer.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough measurement rows to fit a model.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace almcluster
