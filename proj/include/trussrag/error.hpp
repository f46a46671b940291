#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trussrag {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes: input errors -> 2, provider/runtime errors -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class EmptyTruss : public Error {
 public:
  explicit EmptyTruss(int k)
      : Error("no connected " + std::to_string(k) + "-truss in graph"), k_(k) {}
  int k() const noexcept { return k_; }

 private:
  int k_;
};

class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t nodes, std::size_t cap)
      : Error("graph has " + std::to_string(nodes) + " nodes, oracle cap is " +
              std::to_string(cap)) {}
};

class UnsupportedVersion : public Error {
 public:
  explicit UnsupportedVersion(int version)
      : Error("unsupported index format_version " + std::to_string(version)),
        version_(version) {}
  int version() const noexcept { return version_; }

 private:
  int version_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Failures talking to a model provider. `attempts` is the number of requests
// issued before giving up.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int attempts, bool retryable)
      : Error(what), attempts_(attempts), retryable_(retryable) {}
  int attempts() const noexcept { return attempts_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int attempts_;
  bool retryable_;
};

class EmbeddingError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class ExtractionError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class ScoreParseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class GenerationError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

}  // namespace trussrag
