#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relay {

// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operand dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A numeric input violates a range or finiteness precondition.
class ValueError : public Error {
 public:
  using Error::Error;
};

// Invalid penalty or layout configuration (epsilon range, window >= L,
// missing token counts, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Structural problem in a segment schedule: overlap, gap, interval out of
// bounds, or an empty segment list.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

// A softmax row with no finite logit: the query is blocked from every key.
class DegenerateRowError : public Error {
 public:
  DegenerateRowError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace relay
