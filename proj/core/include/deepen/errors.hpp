#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace deepen {

// Bad or contradictory run configuration (unknown keys, out-of-range values).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structural mismatch between a file and its declared schema.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or invalid data content (carries a line number when known).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg, long line = -1)
      : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Required upstream artifact does not exist.
class MissingInputError : public std::runtime_error {
 public:
  explicit MissingInputError(const std::string& path)
      : std::runtime_error("missing input file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Non-finite values where finite arithmetic was required.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg, std::vector<std::size_t> batch_indices = {})
      : std::runtime_error(msg), batch_indices_(std::move(batch_indices)) {}
  const std::vector<std::size_t>& batch_indices() const { return batch_indices_; }

 private:
  std::vector<std::size_t> batch_indices_;
};

}  // namespace deepen
