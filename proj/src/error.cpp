#include "tailclust/error.hpp"

#include <sstream>

namespace tailclust {

namespace {

std::string located(const std::string& what, std::size_t row, std::size_t column) {
  if (row == 0 && column == 0) return what;
  std::ostringstream os;
  os << what << " (";
  if (row != 0) os << "row " << row;
  if (row != 0 && column != 0) os << ", ";
  if (column != 0) os << "column " << column;
  os << ")";
  return os.str();
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t row, std::size_t column)
    : Error(located(what, row, column)), row_(row), column_(column) {}

NonpositiveThreshold::NonpositiveThreshold(std::size_t column, double value)
    : Error("nonpositive scaling threshold in column " + std::to_string(column + 1) +
            " (X_{n-k*:n} = " + std::to_string(value) + ")"),
      column_(column),
      value_(value) {}

NonpositiveOrderStat::NonpositiveOrderStat(std::size_t k, double value)
    : Error("Hill estimator needs X_{n-k:n} > 0, got " + std::to_string(value) +
            " at k = " + std::to_string(k)),
      k_(k),
      value_(value) {}

ActiveSetExhausted::ActiveSetExhausted(std::size_t level)
    : Error("active set exhausted before group " + std::to_string(level) +
            "; the data support fewer groups than requested"),
      level_(level) {}

}  // namespace tailclust
