#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mss {

// Base for all library errors. The CLI maps ConfigError to exit code 2 and
// every other subclass to 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

// Row-aware data problem. `row` is the 1-based data row (0 when not tied to
// a specific row).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg, std::size_t row = 0)
      : Error(row ? msg + " (row " + std::to_string(row) + ")" : msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_ = 0;
};

class ScaleError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class CacheError : public Error {
 public:
  using Error::Error;
};

class NotReadyError : public Error {
 public:
  using Error::Error;
};

class EpisodeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace mss
