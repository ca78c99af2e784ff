#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailclust {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition or invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (CSV, JSON config). Row/column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// The scaling order statistic X_{n-k*:n} of a column is not strictly positive.
class NonpositiveThreshold : public Error {
 public:
  NonpositiveThreshold(std::size_t column, double value);
  /// 0-based column index.
  std::size_t column() const noexcept { return column_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t column_;
  double value_;
};

/// Hill estimation hit a nonpositive X_{n-k:n}.
class NonpositiveOrderStat : public Error {
 public:
  NonpositiveOrderStat(std::size_t k, double value);
  std::size_t k() const noexcept { return k_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t k_;
  double value_;
};

/// Known-g clustering ran out of columns before reaching group `level` (1-based).
class ActiveSetExhausted : public Error {
 public:
  explicit ActiveSetExhausted(std::size_t level);
  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

/// An iterative numerical routine failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace tailclust
